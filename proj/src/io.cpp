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
#include "adatsk/io.hpp"

#include "adatsk/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace adatsk {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw UsageError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw UsageError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw UsageError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

std::optional<std::size_t> to_count_or_auto(const std::string& key, const std::string& v) {
    if (v == "auto") return std::nullopt;
    return static_cast<std::size_t>(to_unsigned(key, v));
}

std::optional<double> to_double_or_auto(const std::string& key, const std::string& v) {
    if (v == "auto") return std::nullopt;
    return to_double(key, v);
}

template <typename F>
auto translate(F&& f) {
    try {
        return f();
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct KeySpec {
    Setter set;
    const char* default_value;
};

const std::map<std::string, KeySpec>& config_keys() {
    static const std::map<std::string, KeySpec> keys = {
        {"dataset", {[](RunConfig& c, const std::string&, const std::string& v) { c.dataset = v; }, "(required)"}},
        {"label_column", {[](RunConfig& c, const std::string&, const std::string& v) { c.label_column = v; }, "class"}},
        {"eta", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.eta = to_double(k, v); }, "0.01"}},
        {"iters_fs", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.iters_fs = to_count_or_auto(k, v); }, "auto"}},
        {"iters_re", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.iters_re = to_count_or_auto(k, v); }, "auto"}},
        {"iters_ft", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.iters_ft = to_count_or_auto(k, v); }, "auto"}},
        {"iters_plain", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.iters_plain = to_count_or_auto(k, v); }, "auto"}},
        {"batch_size", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.batch_size = to_unsigned(k, v); }, "0"}},
        {"sets_fs", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.sets_fs = to_unsigned(k, v); }, "10"}},
        {"sets_re", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.sets_re = to_unsigned(k, v); }, "5"}},
        {"sets_plain", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.sets_plain = to_unsigned(k, v); }, "3"}},
        {"zeta_lambda", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.zeta_lambda = to_double_or_auto(k, v); }, "auto"}},
        {"zeta_theta", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.zeta_theta = to_double_or_auto(k, v); }, "auto"}},
        {"high_dim_threshold", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.high_dim_threshold = to_unsigned(k, v); }, "1000"}},
        {"freeze_centers", {[](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "auto") c.train.freeze_centers.reset();
             else if (v == "true") c.train.freeze_centers = true;
             else if (v == "false") c.train.freeze_centers = false;
             else throw UsageError("config: '" + k + "' expects auto, true or false");
         }, "auto"}},
        {"gate_init", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.gate_init = to_double(k, v); }, "0.01"}},
        {"gate", {[](RunConfig& c, const std::string&, const std::string& v) { c.train.gate_kind = translate([&] { return math::parse_gate_kind(v); }); }, "proposed"}},
        {"fine_tune", {[](RunConfig& c, const std::string&, const std::string& v) { c.train.fine_tune = translate([&] { return parse_fine_tune_mode(v); }); }, "gd"}},
        {"threshold_mode", {[](RunConfig& c, const std::string&, const std::string& v) { c.train.threshold_mode = translate([&] { return parse_threshold_mode(v); }); }, "absolute"}},
        {"tnorm", {[](RunConfig& c, const std::string&, const std::string& v) { c.train.tnorm = translate([&] { return parse_tnorm(v, c.train.tnorm.q); }); }, "ada-softmin"}},
        {"softmin_q", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.tnorm.q = to_int(k, v); }, "-12"}},
        {"seed", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = to_unsigned(k, v); }, "0"}},
        {"folds", {[](RunConfig& c, const std::string& k, const std::string& v) { c.folds = to_unsigned(k, v); }, "10"}},
        {"repeats", {[](RunConfig& c, const std::string& k, const std::string& v) { c.repeats = to_unsigned(k, v); }, "1"}},
        {"out", {[](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }, "out"}},
        {"normalization", {[](RunConfig& c, const std::string&, const std::string& v) { c.normalization = translate([&] { return parse_normalization_mode(v); }); }, "minmax"}},
        {"demo_sets", {[](RunConfig& c, const std::string& k, const std::string& v) { c.demo_sets = to_unsigned(k, v); }, "3"}},
        {"legacy_eta", {[](RunConfig& c, const std::string& k, const std::string& v) { c.legacy_eta = to_double(k, v); }, "0.05"}},
    };
    return keys;
}

} // namespace

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        const auto it = config_keys().find(key);
        if (it == config_keys().end()) {
            throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        it->second.set(config, key, value);
    }
    if (!base_dir.empty()) {
        if (!config.dataset.empty() && config.dataset.is_relative()) config.dataset = base_dir / config.dataset;
        if (config.out.is_relative()) config.out = base_dir / config.out;
    }
    translate([&] {
        config.train.validate();
        return 0;
    });
    if (config.dataset.empty()) throw UsageError("config: dataset is required");
    if (config.folds < 2) throw UsageError("config: folds must be at least 2");
    if (config.repeats == 0) throw UsageError("config: repeats must be positive");
    if (config.demo_sets == 0) throw UsageError("config: demo_sets must be positive");
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path.string() + "'");
    return parse_run_config(in, path.parent_path());
}

std::string describe_config_keys() {
    std::ostringstream out;
    for (const auto& [key, spec] : config_keys()) out << key << " = " << spec.default_value << "\n";
    return out.str();
}

namespace {

json matrix_rows(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

} // namespace

json classifier_to_json(const Classifier& c) {
    const TskModel& m = c.model;
    json rules = json::array();
    for (std::size_t r = 0; r < m.rules.rows(); ++r) {
        const auto row = m.rules.row(r);
        rules.push_back(std::vector<int>(row.begin(), row.end()));
    }
    json consequents = json::array();
    for (std::size_t r = 0; r < m.consequents.rules(); ++r) {
        json block = json::array();
        for (std::size_t j = 0; j <= m.consequents.features(); ++j) {
            json coeffs = json::array();
            for (std::size_t k = 0; k < m.consequents.classes(); ++k) coeffs.push_back(m.consequents(r, j, k));
            block.push_back(std::move(coeffs));
        }
        consequents.push_back(std::move(block));
    }
    return json{
        {"format", "adatsk-model"},
        {"version", 1},
        {"features", c.feature_names},
        {"feature_columns", c.feature_columns},
        {"labels", c.class_names},
        {"normalization",
         {{"mode", std::string(to_string(c.normalization.mode))},
          {"offset", vector_json(c.normalization.offset)},
          {"scale", vector_json(c.normalization.scale)}}},
        {"tnorm", {{"kind", std::string(to_string(c.tnorm.kind))}, {"q", c.tnorm.q}}},
        {"partition", {{"sets", m.partition.sets()}, {"centers", matrix_rows(m.partition.centers)}}},
        {"rule_base", {{"kind", std::string(to_string(m.rules.kind()))}, {"rules", std::move(rules)}}},
        {"consequents", std::move(consequents)},
    };
}

Classifier classifier_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "adatsk-model") throw ParseError("not an adatsk model file");
        Classifier c;
        c.feature_names = j.at("features").get<std::vector<std::string>>();
        c.feature_columns = j.at("feature_columns").get<std::vector<std::size_t>>();
        c.class_names = j.at("labels").get<std::vector<std::string>>();
        const auto& norm = j.at("normalization");
        c.normalization.mode = parse_normalization_mode(norm.at("mode").get<std::string>());
        c.normalization.offset = vector_from(norm.at("offset"));
        c.normalization.scale = vector_from(norm.at("scale"));
        c.tnorm = parse_tnorm(j.at("tnorm").at("kind").get<std::string>(), j.at("tnorm").at("q").get<int>());

        const std::size_t D = c.feature_names.size();
        const std::size_t C = c.class_names.size();
        const auto& centers = j.at("partition").at("centers");
        const std::size_t S = j.at("partition").at("sets").get<std::size_t>();
        if (centers.size() != D) throw ParseError("model: center table does not have one row per feature");
        c.model.partition.centers.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(S));
        for (std::size_t d = 0; d < D; ++d) {
            if (centers.at(d).size() != S) throw ParseError("model: center row has the wrong number of sets");
            for (std::size_t s = 0; s < S; ++s) {
                c.model.partition.centers(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(s)) =
                    centers.at(d).at(s).get<double>();
            }
        }

        const auto& rb = j.at("rule_base");
        const auto& rules = rb.at("rules");
        std::vector<int> entries;
        for (const auto& row : rules) {
            if (row.size() != D) throw ParseError("model: rule row has the wrong number of features");
            for (const auto& v : row) entries.push_back(v.get<int>());
        }
        c.model.rules = IndexMatrix(rules.size(), D, std::move(entries), parse_rule_base_kind(rb.at("kind").get<std::string>()));

        const auto& cons = j.at("consequents");
        if (cons.size() != rules.size()) throw ParseError("model: consequents do not match the rule count");
        c.model.consequents = ConsequentBank(rules.size(), D, C);
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (cons.at(r).size() != D + 1) throw ParseError("model: consequent block has the wrong size");
            for (std::size_t k = 0; k <= D; ++k) {
                if (cons.at(r).at(k).size() != C) throw ParseError("model: consequent row has the wrong class count");
                for (std::size_t cl = 0; cl < C; ++cl) c.model.consequents(r, k, cl) = cons.at(r).at(k).at(cl).get<double>();
            }
        }
        c.model.validate();
        if (static_cast<std::size_t>(c.normalization.offset.size()) != D ||
            static_cast<std::size_t>(c.normalization.scale.size()) != D) {
            throw ParseError("model: normalization statistics do not match the feature count");
        }
        return c;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_classifier(const Classifier& classifier, const std::filesystem::path& path) {
    write_text(path, classifier_to_json(classifier).dump(2) + "\n");
}

Classifier load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("model '" + path.string() + "': " + e.what());
    }
    return classifier_from_json(j);
}

json report_to_json(const PipelineReport& report) {
    json runs = json::array();
    for (const auto& r : report.runs) {
        runs.push_back({{"repeat", r.repeat},
                        {"fold", r.fold},
                        {"accuracy", r.accuracy},
                        {"train_accuracy", r.train_accuracy},
                        {"selected_features", r.selected_features},
                        {"rules", r.rules}});
    }
    return json{{"folds", report.folds},
                {"repeats", report.repeats},
                {"runs", std::move(runs)},
                {"mean_accuracy", report.mean_accuracy},
                {"mean_train_accuracy", report.mean_train_accuracy},
                {"mean_selected_features", report.mean_selected_features},
                {"mean_rules", report.mean_rules}};
}

json timing_to_json(const PipelineReport& report) {
    json runs = json::array();
    for (const auto& r : report.runs) {
        runs.push_back({{"repeat", r.repeat},
                        {"fold", r.fold},
                        {"seconds_feature_selection", r.seconds_fs},
                        {"seconds_rule_extraction", r.seconds_re},
                        {"seconds_fine_tuning", r.seconds_ft}});
    }
    return json{{"runs", std::move(runs)}};
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const Matrix& trajectory, const std::vector<std::string>& names,
                          const std::filesystem::path& path) {
    if (static_cast<std::size_t>(trajectory.cols()) != names.size()) {
        throw InvalidArgument("write_trajectory_csv: one name per column required");
    }
    std::string text = "iteration";
    for (const auto& n : names) text += "," + n;
    text += "\n";
    for (Eigen::Index i = 0; i < trajectory.rows(); ++i) {
        text += std::to_string(i + 1);
        for (Eigen::Index j = 0; j < trajectory.cols(); ++j) text += "," + format_double(trajectory(i, j));
        text += "\n";
    }
    write_text(path, text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw UsageError("output directory '" + dir.string() + "' cannot be created");
    }
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw UsageError("output directory '" + dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

} // namespace adatsk
