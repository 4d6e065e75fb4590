/*   Copyright 2026 The AdaTSK Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */
#include "adatsk/commands.hpp"

#include "adatsk/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace adatsk {

using nlohmann::json;

int run_guarded(const std::function<void()>& body, std::ostream& err) {
    try {
        body();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (...) {
        err << "internal error: unknown exception\n";
        return kExitInternal;
    }
}

namespace {

Dataset load_dataset(const RunConfig& config) {
    if (config.dataset.empty()) throw UsageError("config: 'dataset' is required");
    if (!std::filesystem::exists(config.dataset)) {
        throw UsageError("dataset '" + config.dataset.string() + "' does not exist");
    }
    return load_csv(config.dataset, config.label_column);
}

Dataset normalized_copy(const Dataset& raw, NormalizationMode mode) {
    Dataset out = raw;
    out.features = normalize(raw.features, fit_normalization(raw.features, mode));
    return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> rule_names(std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t r = 0; r < count; ++r) names.push_back("rule_" + std::to_string(r + 1));
    return names;
}

std::vector<std::string> pick(const std::vector<std::string>& names, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(names.at(i));
    return out;
}

} // namespace

PipelineReport cmd_fsre(const RunConfig& config, std::ostream& log) {
    const Dataset raw = load_dataset(config);
    ensure_writable_dir(config.out);
    log << "dataset " << config.dataset.filename().string() << ": " << raw.size() << " instances, " << raw.dims()
        << " features, " << raw.classes << " classes\n";

    PipelineReport report =
        cross_validate(raw, config.train, config.folds, config.repeats, Method::fsre, config.normalization);
    log << "cross-validation (" << config.folds << " folds x " << config.repeats
        << " repeats): accuracy " << format_double(report.mean_accuracy) << ", features "
        << format_double(report.mean_selected_features) << ", rules " << format_double(report.mean_rules) << "\n";

    const FitResult final_fit = fit(raw, config.train, Method::fsre, config.normalization);
    const Classifier& clf = final_fit.classifier;
    const double train_acc = accuracy(clf.predict_full(raw.features), raw.labels);
    log << "full-data model: " << clf.feature_names.size() << " features, " << clf.model.rule_count()
        << " rules, training accuracy " << format_double(train_acc) << "\n";

    json report_json = report_to_json(report);
    report_json["final_model"] = {{"train_accuracy", train_acc},
                                  {"selected_features", clf.feature_names},
                                  {"rules", clf.model.rule_count()}};
    json timing = timing_to_json(report);
    timing["final_model"] = {{"seconds_feature_selection", final_fit.phases.fs.seconds},
                             {"seconds_rule_extraction", final_fit.phases.re.seconds},
                             {"seconds_fine_tuning", final_fit.phases.ft.seconds}};

    write_text(config.out / "report.json", dump(report_json));
    write_text(config.out / "timing.json", dump(timing));
    save_classifier(clf, config.out / "model.json");
    write_trajectory_csv(final_fit.phases.fs.gate_trajectory, raw.feature_names, config.out / "gates_fs.csv");
    write_trajectory_csv(final_fit.phases.re.gate_trajectory,
                         rule_names(static_cast<std::size_t>(final_fit.phases.re.gate_trajectory.cols())),
                         config.out / "gates_re.csv");
    return report;
}

std::vector<TnormOutcome> cmd_compare_tnorms(const RunConfig& config, std::ostream& log) {
    const Dataset raw = load_dataset(config);
    ensure_writable_dir(config.out);
    const Dataset norm = normalized_copy(raw, config.normalization);

    const std::array<double, 4> probe{0.5, 0.55, 0.49, 0.48};
    const double softmin_probe = math::fixed_softmin(probe, config.train.tnorm.q);
    const auto probe_q = math::adaptive_exponent(probe);
    const double ada_probe = math::ada_softmin_firing(probe, probe_q);
    log << "probe (0.5, 0.55, 0.49, 0.48): softmin q=" << config.train.tnorm.q << " -> "
        << format_double(softmin_probe) << ", Ada-softmin q=" << probe_q.value() << " -> "
        << format_double(ada_probe) << ", true minimum 0.48\n";

    TskModel initial;
    initial.partition = place_centers(norm.features, config.train.sets_plain);
    initial.rules = build_coco(config.train.sets_plain, norm.dims());
    initial.consequents = ConsequentBank(initial.rules.rows(), norm.dims(), norm.classes);

    const std::array<TNorm, 3> operators{TNorm{TNormKind::product, config.train.tnorm.q},
                                         TNorm{TNormKind::softmin, config.train.tnorm.q},
                                         TNorm{TNormKind::ada_softmin, config.train.tnorm.q}};
    std::vector<TnormOutcome> outcomes;
    json rows = json::array();
    for (const auto& tn : operators) {
        TnormOutcome outcome;
        outcome.tnorm = tn;
        const Matrix firing = compute_firing(norm.features, initial, tn, nullptr, false).firing;
        const auto zeros = (firing.array() == 0.0).count();
        outcome.zero_firing_fraction = static_cast<double>(zeros) / static_cast<double>(firing.size());
        if (zeros > 0) {
            outcome.status = "underflow";
            outcome.detail = std::to_string(zeros) + " of " + std::to_string(firing.size()) +
                             " firing strengths are zero at the initial partition";
        } else {
            TrainConfig train = config.train;
            train.tnorm = tn;
            try {
                const PipelineReport rep =
                    cross_validate(raw, train, config.folds, config.repeats, Method::plain, config.normalization);
                outcome.status = "ok";
                outcome.accuracy = rep.mean_accuracy;
            } catch (const DegenerateFiring& e) {
                outcome.status = "underflow";
                outcome.detail = e.what();
            } catch (const TrainingDiverged& e) {
                outcome.status = "diverged";
                outcome.detail = e.what();
            }
        }
        log << to_string(tn.kind) << ": " << outcome.status;
        if (outcome.accuracy) log << ", accuracy " << format_double(*outcome.accuracy);
        if (!outcome.detail.empty()) log << " (" << outcome.detail << ")";
        log << "\n";

        json row = {{"tnorm", std::string(to_string(tn.kind))},
                    {"status", outcome.status},
                    {"accuracy", outcome.accuracy ? json(*outcome.accuracy) : json(nullptr)},
                    {"zero_firing_fraction", outcome.zero_firing_fraction}};
        if (tn.kind == TNormKind::softmin) row["q"] = tn.q;
        if (!outcome.detail.empty()) row["detail"] = outcome.detail;
        rows.push_back(std::move(row));
        outcomes.push_back(std::move(outcome));
    }

    const json out = {{"sets", config.train.sets_plain},
                      {"folds", config.folds},
                      {"repeats", config.repeats},
                      {"results", std::move(rows)},
                      {"probe",
                       {{"values", probe},
                        {"softmin_q", config.train.tnorm.q},
                        {"softmin", softmin_probe},
                        {"ada_softmin_q", probe_q.value()},
                        {"ada_softmin", ada_probe}}}};
    write_text(config.out / "tnorm_report.json", dump(out));
    return outcomes;
}

double matched_gate_parameter(math::GateKind kind, double reference) {
    const double target = math::gate_value(math::GateKind::proposed, reference);
    if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("matched_gate_parameter: reference gate value must lie in (0, 1)");
    switch (kind) {
    case math::GateKind::proposed:
        return reference;
    case math::GateKind::sigmoid:
        return std::log(target / (1.0 - target));
    case math::GateKind::one_minus_exp:
        return std::sqrt(-std::log1p(-target));
    case math::GateKind::exp_sq:
        return std::sqrt(-std::log(target));
    }
    throw InvalidArgument("matched_gate_parameter: unknown gate kind");
}

std::vector<GateDemoRun> cmd_gate_demo(const RunConfig& config, std::ostream& log) {
    const Dataset raw = load_dataset(config);
    if (raw.dims() < 2) throw UsageError("gate-demo needs a dataset with at least 2 features");
    ensure_writable_dir(config.out);
    const Dataset norm = normalized_copy(raw, config.normalization);

    struct Plan {
        std::string name;
        math::GateKind kind;
        double eta;
    };
    const std::array<Plan, 3> plans{Plan{"proposed", math::GateKind::proposed, config.train.eta},
                                    Plan{"exp_sq", math::GateKind::exp_sq, config.train.eta},
                                    Plan{"exp_sq_legacy_eta", math::GateKind::exp_sq, config.legacy_eta}};

    std::vector<GateDemoRun> runs;
    json summary = json::array();
    for (const auto& plan : plans) {
        TrainConfig train = config.train;
        train.sets_fs = config.demo_sets;
        train.gate_kind = plan.kind;
        train.eta = plan.eta;
        train.gate_init = matched_gate_parameter(plan.kind, config.train.gate_init);

        const PhaseResult phase = run_phase_fs(norm, train);
        GateDemoRun run;
        run.name = plan.name;
        run.kind = plan.kind;
        run.eta = plan.eta;
        run.initial_lambda = train.gate_init;
        run.trajectory = phase.gate_trajectory;
        run.spread.resize(static_cast<std::size_t>(run.trajectory.rows()));
        for (Eigen::Index i = 0; i < run.trajectory.rows(); ++i) {
            const auto row = run.trajectory.row(i).cwiseAbs();
            run.spread[static_cast<std::size_t>(i)] = row.maxCoeff() - row.minCoeff();
        }
        write_trajectory_csv(run.trajectory, raw.feature_names, config.out / ("gates_" + plan.name + ".csv"));
        const double final_spread = run.spread.empty() ? 0.0 : run.spread.back();
        log << plan.name << " (eta " << format_double(plan.eta) << "): " << run.trajectory.rows()
            << " iterations, final spread " << format_double(final_spread) << ", selected "
            << phase.selected_features.size() << " features\n";
        summary.push_back({{"run", plan.name},
                           {"gate", std::string(math::to_string(plan.kind))},
                           {"eta", plan.eta},
                           {"initial_lambda", run.initial_lambda},
                           {"iterations", run.trajectory.rows()},
                           {"final_spread", final_spread},
                           {"selected_features", pick(raw.feature_names, phase.selected_features)}});
        runs.push_back(std::move(run));
    }

    // First iteration from which the proposed gate's spread stays above the
    // exp-sq spread at the same learning rate.
    const auto& a = runs[0].spread;
    const auto& b = runs[1].spread;
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t dominant_from = n + 1;
    for (std::size_t i = n; i > 0; --i) {
        if (a[i - 1] > b[i - 1]) dominant_from = i;
        else break;
    }
    json out = {{"sets", config.demo_sets}, {"runs", std::move(summary)}};
    out["proposed_exceeds_exp_sq_from"] = dominant_from <= n ? json(dominant_from) : json(nullptr);
    write_text(config.out / "gate_demo.json", dump(out));
    return runs;
}

void cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& input, std::ostream& out) {
    const Classifier clf = load_classifier(model_path);
    if (!std::filesystem::exists(input)) throw UsageError("input '" + input.string() + "' does not exist");
    const CsvTable table = read_csv(input);
    if (table.header.empty()) return;

    std::vector<std::size_t> columns;
    std::vector<std::string> missing;
    for (const auto& name : clf.feature_names) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) missing.push_back(name);
        else columns.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw UsageError("input '" + input.string() + "' is missing feature column(s): " + names);
    }
    if (table.rows.empty()) return;

    Matrix raw(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j] >= row.size()) {
                throw ParseError("line " + std::to_string(table.line_numbers[i]) + ": too few fields");
            }
            raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_number(row[columns[j]], table.line_numbers[i], clf.feature_names[j]);
        }
    }
    for (const auto c : clf.predict(raw)) out << clf.class_names.at(c) << "\n";
}

void cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& output) {
    const Dataset ds = make_synthetic(spec);
    std::string text;
    for (std::size_t d = 0; d < ds.dims(); ++d) text += ds.feature_names[d] + ",";
    text += "class\n";
    for (std::size_t n = 0; n < ds.size(); ++n) {
        for (std::size_t d = 0; d < ds.dims(); ++d) {
            text += format_double(ds.features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)));
            text += ',';
        }
        text += ds.class_names[static_cast<std::size_t>(ds.labels[n])] + "\n";
    }
    write_text(output, text);
}

} // namespace adatsk
