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
#include "adatsk/pipeline.hpp"

#include "adatsk/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace adatsk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double gate_score(double value, ThresholdMode mode) { return mode == ThresholdMode::absolute ? std::abs(value) : value; }

// Indices sorted by descending score; equal scores keep index order.
std::vector<std::size_t> ranking(const Vector& scores) {
    std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
    });
    return order;
}

Vector scores_of(const Vector& gate_values, ThresholdMode mode) {
    return gate_values.unaryExpr([mode](double v) { return gate_score(v, mode); });
}

void require_valid(const Dataset& train) {
    if (train.size() == 0) throw InvalidArgument("training set is empty");
    if (train.dims() == 0) throw InvalidArgument("training set has no features");
    if (train.classes == 0) throw InvalidArgument("training set has no classes");
}

} // namespace

double gate_threshold(std::span<const double> gate_values, double zeta, ThresholdMode mode) {
    if (gate_values.empty()) throw InvalidArgument("gate_threshold: no gate values");
    double hi = gate_score(gate_values.front(), mode);
    double lo = hi;
    for (double v : gate_values) {
        const double s = gate_score(v, mode);
        hi = std::max(hi, s);
        lo = std::min(lo, s);
    }
    return hi - zeta * (hi - lo);
}

double threshold_lambda(std::span<const double> gate_values, double zeta_lambda) {
    return gate_threshold(gate_values, zeta_lambda, ThresholdMode::absolute);
}

double threshold_theta(std::span<const double> gate_values, double zeta_theta) {
    return gate_threshold(gate_values, zeta_theta, ThresholdMode::absolute);
}

PhaseResult run_phase_fs(const Dataset& train, const TrainConfig& config) {
    config.validate();
    require_valid(train);
    const auto start = Clock::now();
    const std::size_t D = train.dims();
    const Matrix targets = one_hot(train.labels, train.classes);

    PhaseResult result;
    result.model.partition = place_centers(train.features, config.sets_fs);
    result.model.rules = build_coco(config.sets_fs, D);
    result.model.consequents = init_consequents(config.sets_fs, D, train.classes);
    result.gates = GateBank::feature_gated(D, config.gate_init, config.gate_kind);

    GdOptions opts;
    opts.eta = config.eta;
    opts.iterations = config.iterations_fs(D);
    opts.batch_size = config.batch_size;
    opts.train_centers = !config.centers_frozen(D);
    opts.record_gates = true;
    opts.phase = "feature selection";
    auto run = train_gd(train.features, targets, result.model, result.gates, config.tnorm, opts);
    result.losses = std::move(run.losses);
    result.gate_trajectory = std::move(run.gate_trajectory);

    const Vector gates = result.gates.gate_values();
    result.threshold = gate_threshold({gates.data(), D}, config.zeta_lambda_for(D), config.threshold_mode);
    const Vector scores = scores_of(gates, config.threshold_mode);
    for (std::size_t d = 0; d < D; ++d) {
        const auto col = train.features.col(static_cast<Eigen::Index>(d));
        const bool informative = col.maxCoeff() > col.minCoeff();
        if (informative && scores(static_cast<Eigen::Index>(d)) >= result.threshold) {
            result.selected_features.push_back(d);
        }
    }
    if (result.selected_features.empty()) {
        result.selected_features.push_back(ranking(scores).front());
    }
    result.seconds = seconds_since(start);
    return result;
}

PhaseResult run_phase_re(const Dataset& reduced_train, const TrainConfig& config, std::size_t original_dims) {
    config.validate();
    require_valid(reduced_train);
    const auto start = Clock::now();
    const std::size_t D = reduced_train.dims();
    const Matrix targets = one_hot(reduced_train.labels, reduced_train.classes);

    PhaseResult result;
    result.model.partition = place_centers(reduced_train.features, config.sets_re);
    result.model.rules = build_enfrb(config.sets_re, D);
    const std::size_t R = result.model.rules.rows();
    result.model.consequents = init_consequents(R, D, reduced_train.classes);
    result.gates = GateBank::rule_gated(R, config.gate_init, config.gate_kind);

    GdOptions opts;
    opts.eta = config.eta;
    opts.iterations = config.iterations_re(original_dims);
    opts.batch_size = config.batch_size;
    opts.train_centers = !config.centers_frozen(original_dims);
    opts.record_gates = true;
    opts.phase = "rule extraction";
    auto run = train_gd(reduced_train.features, targets, result.model, result.gates, config.tnorm, opts);
    result.losses = std::move(run.losses);
    result.gate_trajectory = std::move(run.gate_trajectory);

    const Vector gates = result.gates.gate_values();
    result.threshold = gate_threshold({gates.data(), R}, config.zeta_theta_for(original_dims), config.threshold_mode);
    const Vector scores = scores_of(gates, config.threshold_mode);
    for (std::size_t r = 0; r < R; ++r) {
        if (scores(static_cast<Eigen::Index>(r)) >= result.threshold) result.retained_rules.push_back(r);
    }
    const std::size_t floor = std::min(reduced_train.classes, R);
    if (result.retained_rules.size() < floor) {
        auto order = ranking(scores);
        order.resize(floor);
        std::sort(order.begin(), order.end());
        result.retained_rules = std::move(order);
    }
    result.seconds = seconds_since(start);
    return result;
}

PhaseResult run_phase_ft(const Dataset& reduced_train, const PhaseResult& extraction, const TrainConfig& config,
                         std::size_t original_dims) {
    config.validate();
    require_valid(reduced_train);
    if (extraction.retained_rules.empty()) throw InvalidState("fine tuning needs at least one retained rule");
    const auto start = Clock::now();
    const Matrix targets = one_hot(reduced_train.labels, reduced_train.classes);

    PhaseResult result;
    result.model.partition = extraction.model.partition;
    result.model.rules = extraction.model.rules.select_rows(extraction.retained_rules);
    result.model.consequents = extraction.model.consequents.select_rules(extraction.retained_rules);
    for (std::size_t i = 0; i < extraction.retained_rules.size(); ++i) {
        result.model.consequents.rule(i) *= extraction.gates.rule_gate(extraction.retained_rules[i]);
    }
    result.retained_rules = extraction.retained_rules;
    result.gates = GateBank::ungated();

    if (config.fine_tune == FineTuneMode::lse) {
        const FiringTable firing = compute_firing(reduced_train.features, result.model, config.tnorm);
        const auto before = evaluate_batch(reduced_train.features, targets, result.model, result.gates, config.tnorm, &firing);
        result.model.consequents = lse_consequents(reduced_train.features, targets, firing.normalized);
        const auto after = evaluate_batch(reduced_train.features, targets, result.model, result.gates, config.tnorm, &firing);
        if (!std::isfinite(after.loss)) throw TrainingDiverged("fine tuning", "non-finite loss after least squares");
        result.losses = {before.loss, after.loss};
    } else {
        GdOptions opts;
        opts.eta = config.eta;
        opts.iterations = config.iterations_ft(original_dims);
        opts.batch_size = config.batch_size;
        opts.train_centers = !config.centers_frozen(original_dims);
        opts.phase = "fine tuning";
        auto run = train_gd(reduced_train.features, targets, result.model, result.gates, config.tnorm, opts);
        result.losses = std::move(run.losses);
    }
    result.seconds = seconds_since(start);
    return result;
}

PipelineResult run_pipeline(const Dataset& train, const TrainConfig& config) {
    PipelineResult out;
    out.fs = run_phase_fs(train, config);
    const Dataset reduced = train.select_features(out.fs.selected_features);
    out.re = run_phase_re(reduced, config, train.dims());
    out.ft = run_phase_ft(reduced, out.re, config, train.dims());
    return out;
}

PhaseResult run_plain(const Dataset& train, const TrainConfig& config) {
    config.validate();
    require_valid(train);
    const auto start = Clock::now();
    const std::size_t D = train.dims();
    const Matrix targets = one_hot(train.labels, train.classes);

    PhaseResult result;
    result.model.partition = place_centers(train.features, config.sets_plain);
    result.model.rules = build_coco(config.sets_plain, D);
    result.model.consequents = init_consequents(config.sets_plain, D, train.classes);
    result.gates = GateBank::ungated();
    result.selected_features.resize(D);
    std::iota(result.selected_features.begin(), result.selected_features.end(), std::size_t{0});
    result.retained_rules.resize(config.sets_plain);
    std::iota(result.retained_rules.begin(), result.retained_rules.end(), std::size_t{0});

    GdOptions opts;
    opts.eta = config.eta;
    opts.iterations = config.iterations_plain(D);
    opts.batch_size = config.batch_size;
    opts.train_centers = !config.centers_frozen(D);
    opts.phase = "plain";
    auto run = train_gd(train.features, targets, result.model, result.gates, config.tnorm, opts);
    result.losses = std::move(run.losses);
    result.seconds = seconds_since(start);
    return result;
}

Matrix Classifier::outputs(const Matrix& raw) const {
    if (static_cast<std::size_t>(raw.cols()) != feature_columns.size()) {
        throw InvalidArgument("classifier expects " + std::to_string(feature_columns.size()) + " features, got " +
                              std::to_string(raw.cols()));
    }
    const Matrix x = normalize(raw, normalization);
    const Matrix zeros = Matrix::Zero(raw.rows(), static_cast<Eigen::Index>(model.classes()));
    return evaluate_batch(x, zeros, model, GateBank::ungated(), tnorm).outputs;
}

std::vector<std::size_t> Classifier::predict(const Matrix& raw) const {
    const Matrix y = outputs(raw);
    std::vector<std::size_t> out(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index n = 0; n < y.rows(); ++n) {
        out[static_cast<std::size_t>(n)] = argmax_class({y.row(n).data(), static_cast<std::size_t>(y.cols())});
    }
    return out;
}

std::vector<std::size_t> Classifier::predict_full(const Matrix& raw_all) const {
    Matrix picked(raw_all.rows(), static_cast<Eigen::Index>(feature_columns.size()));
    for (std::size_t j = 0; j < feature_columns.size(); ++j) {
        picked.col(static_cast<Eigen::Index>(j)) = raw_all.col(static_cast<Eigen::Index>(feature_columns[j]));
    }
    return predict(picked);
}

FitResult fit(const Dataset& raw_train, const TrainConfig& config, Method method, NormalizationMode normalization) {
    const NormalizationStats stats = fit_normalization(raw_train.features, normalization);
    Dataset train = raw_train;
    train.features = normalize(raw_train.features, stats);

    FitResult out;
    const TskModel* model = nullptr;
    const std::vector<std::size_t>* selected = nullptr;
    if (method == Method::fsre) {
        out.phases = run_pipeline(train, config);
        model = &out.phases.model();
        selected = &out.phases.selected_features();
    } else {
        out.plain = run_plain(train, config);
        model = &out.plain.model;
        selected = &out.plain.selected_features;
    }

    Classifier& c = out.classifier;
    c.model = *model;
    c.tnorm = config.tnorm;
    c.class_names = raw_train.class_names;
    c.feature_columns = *selected;
    c.normalization.mode = normalization;
    c.normalization.offset.resize(static_cast<Eigen::Index>(selected->size()));
    c.normalization.scale.resize(static_cast<Eigen::Index>(selected->size()));
    for (std::size_t j = 0; j < selected->size(); ++j) {
        const auto src = static_cast<Eigen::Index>((*selected)[j]);
        c.normalization.offset(static_cast<Eigen::Index>(j)) = stats.offset(src);
        c.normalization.scale(static_cast<Eigen::Index>(j)) = stats.scale(src);
        c.feature_names.push_back(raw_train.feature_names.empty() ? "x" + std::to_string(src)
                                                                  : raw_train.feature_names[static_cast<std::size_t>(src)]);
    }
    return out;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const int> labels) {
    if (predicted.size() != labels.size()) throw InvalidArgument("accuracy: size mismatch");
    if (predicted.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == static_cast<std::size_t>(labels[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

PipelineReport cross_validate(const Dataset& raw, const TrainConfig& config, std::size_t folds, std::size_t repeats,
                              Method method, NormalizationMode normalization) {
    config.validate();
    if (repeats == 0) throw InvalidArgument("cross_validate: repeats must be positive");
    if (raw.size() < folds) {
        throw InvalidArgument("cross_validate: " + std::to_string(raw.size()) + " instances cannot fill " +
                              std::to_string(folds) + " folds");
    }

    std::vector<std::vector<std::size_t>> assignments;
    for (std::size_t k = 0; k < repeats; ++k) {
        assignments.push_back(kfold_split(raw.labels, raw.classes, folds, config.seed + k));
    }

    PipelineReport report;
    report.folds = folds;
    report.repeats = repeats;
    report.runs.resize(folds * repeats);
    std::vector<std::exception_ptr> errors(report.runs.size());

    auto run_one = [&](std::size_t index) {
        const std::size_t k = index / folds;
        const std::size_t f = index % folds;
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            (assignments[k][i] == f ? test_rows : train_rows).push_back(i);
        }
        const Dataset train = raw.subset(train_rows);
        const Dataset test = raw.subset(test_rows);
        const FitResult fitted = fit(train, config, method, normalization);

        RunRecord& rec = report.runs[index];
        rec.repeat = k;
        rec.fold = f;
        rec.accuracy = accuracy(fitted.classifier.predict_full(test.features), test.labels);
        rec.train_accuracy = accuracy(fitted.classifier.predict_full(train.features), train.labels);
        rec.selected_features = fitted.classifier.feature_columns.size();
        rec.rules = fitted.classifier.model.rule_count();
        if (method == Method::fsre) {
            rec.seconds_fs = fitted.phases.fs.seconds;
            rec.seconds_re = fitted.phases.re.seconds;
            rec.seconds_ft = fitted.phases.ft.seconds;
        } else {
            rec.seconds_ft = fitted.plain.seconds;
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), report.runs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < report.runs.size(); i = next++) {
            try {
                run_one(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (const auto& r : report.runs) {
        report.mean_accuracy += r.accuracy;
        report.mean_train_accuracy += r.train_accuracy;
        report.mean_selected_features += static_cast<double>(r.selected_features);
        report.mean_rules += static_cast<double>(r.rules);
    }
    const double n = static_cast<double>(report.runs.size());
    report.mean_accuracy /= n;
    report.mean_train_accuracy /= n;
    report.mean_selected_features /= n;
    report.mean_rules /= n;
    return report;
}

} // namespace adatsk
