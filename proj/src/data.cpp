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
#include "adatsk/data.hpp"

#include "adatsk/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <unordered_map>

namespace adatsk {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(labels.at(rows[i]));
    }
    out.classes = classes;
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

Dataset Dataset::select_features(std::span<const std::size_t> columns) const {
    Dataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] >= dims()) throw InvalidArgument("select_features: column index out of range");
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(static_cast<Eigen::Index>(columns[j]));
        if (!feature_names.empty()) out.feature_names.push_back(feature_names[columns[j]]);
    }
    out.labels = labels;
    out.classes = classes;
    out.class_names = class_names;
    return out;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string current;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
            current.push_back(ch);
        } else if (ch == ',' && !quoted) {
            cells.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    cells.push_back(trim(current));
    return cells;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
    auto fail = [&](const char* why) {
        return ParseError("row at line " + std::to_string(line) + ", column '" + std::string(column) + "': " + why +
                          " ('" + std::string(cell) + "')");
    };
    if (cell.empty()) throw fail("empty cell");
    std::string buf(cell);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) throw fail("not a number");
    if (!std::isfinite(v)) throw fail("non-finite value");
    return v;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw ParseError("'" + path.string() + "' is empty");
    if (table.rows.empty()) throw ParseError("'" + path.string() + "' has a header but no data rows");
    const std::size_t label_idx = table.column(label_column);

    Dataset ds;
    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j == label_idx) continue;
        feature_cols.push_back(j);
        ds.feature_names.push_back(table.header[j]);
    }
    if (feature_cols.empty()) throw ParseError("'" + path.string() + "' has no feature columns");

    const std::size_t N = table.rows.size();
    ds.features.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(feature_cols.size()));
    std::unordered_map<std::string, int> label_ids;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& row = table.rows[i];
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_number(row[feature_cols[j]], table.line_numbers[i], table.header[feature_cols[j]]);
        }
        const std::string& label = row[label_idx];
        if (label.empty()) {
            throw ParseError("row at line " + std::to_string(table.line_numbers[i]) + ": empty label");
        }
        auto [it, inserted] = label_ids.try_emplace(label, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(label);
        ds.labels.push_back(it->second);
    }
    ds.classes = ds.class_names.size();
    return ds;
}

std::string_view to_string(NormalizationMode mode) {
    return mode == NormalizationMode::minmax ? "minmax" : "zscore";
}

NormalizationMode parse_normalization_mode(std::string_view name) {
    if (name == "minmax") return NormalizationMode::minmax;
    if (name == "zscore") return NormalizationMode::zscore;
    throw InvalidArgument("unknown normalization mode '" + std::string(name) + "'");
}

NormalizationStats fit_normalization(const Matrix& train_features, NormalizationMode mode) {
    if (train_features.rows() == 0) throw InvalidArgument("fit_normalization: empty training set");
    NormalizationStats stats;
    stats.mode = mode;
    const Eigen::Index D = train_features.cols();
    stats.offset.resize(D);
    stats.scale.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) {
        const auto col = train_features.col(d);
        if (mode == NormalizationMode::minmax) {
            stats.offset(d) = col.minCoeff();
            stats.scale(d) = col.maxCoeff() - stats.offset(d);
        } else {
            const double mean = col.mean();
            stats.offset(d) = mean;
            stats.scale(d) = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(col.size()));
        }
    }
    return stats;
}

Matrix normalize(const Matrix& features, const NormalizationStats& stats) {
    if (features.cols() != stats.offset.size()) {
        throw InvalidArgument("normalize: feature count does not match the statistics");
    }
    Matrix out(features.rows(), features.cols());
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
        if (stats.scale(d) > 0.0) {
            out.col(d) = (features.col(d).array() - stats.offset(d)) / stats.scale(d);
        } else {
            out.col(d).setZero();
        }
    }
    return out;
}

Matrix one_hot(std::span<const int> labels, std::size_t classes) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(classes));
    for (std::size_t n = 0; n < labels.size(); ++n) {
        if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= classes) {
            throw InvalidArgument("one_hot: label " + std::to_string(labels[n]) + " out of range for " +
                                  std::to_string(classes) + " classes");
        }
        out(static_cast<Eigen::Index>(n), labels[n]) = 1.0;
    }
    return out;
}

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        // Rejection sampling for an unbiased index in [0, i).
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw = rng();
        while (draw >= limit) draw = rng();
        std::swap(items[i - 1], items[static_cast<std::size_t>(draw % bound)]);
    }
}

std::vector<std::size_t> kfold_split(std::span<const int> labels, std::size_t classes, std::size_t folds,
                                     std::uint64_t seed) {
    if (folds == 0) throw InvalidArgument("kfold_split: need at least one fold");
    if (labels.size() < folds) {
        throw InvalidArgument("kfold_split: " + std::to_string(labels.size()) + " instances cannot fill " +
                              std::to_string(folds) + " folds");
    }
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    seeded_shuffle(order, seed);

    std::vector<std::size_t> fold_of(labels.size());
    std::size_t counter = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t idx : order) {
            if (static_cast<std::size_t>(labels[idx]) == c) fold_of[idx] = counter++ % folds;
        }
    }
    if (counter != labels.size()) throw InvalidArgument("kfold_split: label out of range");
    return fold_of;
}

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal() {
        // Box-Muller; the second variate is discarded for simplicity.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace

Dataset make_synthetic(const SyntheticSpec& spec) {
    if (spec.samples == 0 || spec.features == 0 || spec.classes < 2) {
        throw InvalidArgument("make_synthetic: need samples, features and at least two classes");
    }
    if (spec.informative > spec.features) throw InvalidArgument("make_synthetic: more informative than total features");
    Rng rng(spec.seed);
    std::size_t bits = 1;
    while ((std::size_t{1} << bits) < spec.classes) ++bits;

    Dataset ds;
    ds.classes = spec.classes;
    for (std::size_t c = 0; c < spec.classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (std::size_t d = 0; d < spec.features; ++d) {
        ds.feature_names.push_back((d < spec.informative ? "sig" : "bg") + std::to_string(d));
    }
    ds.features.resize(static_cast<Eigen::Index>(spec.samples), static_cast<Eigen::Index>(spec.features));
    for (std::size_t n = 0; n < spec.samples; ++n) {
        const int label = static_cast<int>(n % spec.classes);
        ds.labels.push_back(label);
        for (std::size_t d = 0; d < spec.features; ++d) {
            int state;
            if (d < spec.informative) {
                state = (label >> (d % bits)) & 1;
                if (d % 2 == 1) state ^= 1;
                if (rng.uniform() < spec.flip) state ^= 1;
            } else {
                state = rng.uniform() < 0.5 ? 1 : 0;
            }
            ds.features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)) =
                static_cast<double>(state) + spec.noise * rng.normal();
        }
    }
    return ds;
}

} // namespace adatsk
