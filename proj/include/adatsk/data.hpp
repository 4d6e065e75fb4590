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
#pragma once

// Dataset ingestion (CSV), feature scaling, one-hot targets, stratified fold
// assignment, and a synthetic high-dimensional generator.

#include "adatsk/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adatsk {

struct Dataset {
    Matrix features;                        // N x D
    std::vector<int> labels;                // class indices in 0..C-1
    std::size_t classes = 0;
    std::vector<std::string> feature_names; // D entries
    std::vector<std::string> class_names;   // C entries, first-appearance order

    std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }

    /// Rows in the given order; class metadata is kept.
    Dataset subset(std::span<const std::size_t> rows) const;
    /// Columns in the given order.
    Dataset select_features(std::span<const std::size_t> columns) const;
};

/// Raw CSV contents: header plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row

    /// Column index by name; throws ParseError naming the column if absent.
    std::size_t column(std::string_view name) const;
};

/// Comma-separated, header row mandatory. An empty file yields an empty table.
CsvTable read_csv(const std::filesystem::path& path);

/// Parses a numeric cell; throws ParseError with the location on failure or
/// non-finite value.
double parse_number(std::string_view cell, std::size_t line, std::string_view column);

/// All columns except `label_column` become features. Labels are mapped to
/// dense indices in order of first appearance.
Dataset load_csv(const std::filesystem::path& path, std::string_view label_column);

enum class NormalizationMode { minmax, zscore };

std::string_view to_string(NormalizationMode mode);
NormalizationMode parse_normalization_mode(std::string_view name);

/// Per-feature affine map x' = (x - offset) / scale, fitted on a training
/// split. For min-max, offset is the minimum and scale the range; for z-score,
/// the mean and standard deviation. Zero scale maps the feature to 0.
struct NormalizationStats {
    NormalizationMode mode = NormalizationMode::minmax;
    Vector offset;
    Vector scale;
};

NormalizationStats fit_normalization(const Matrix& train_features, NormalizationMode mode = NormalizationMode::minmax);

/// No clipping: test values may fall outside [0, 1].
Matrix normalize(const Matrix& features, const NormalizationStats& stats);

Matrix one_hot(std::span<const int> labels, std::size_t classes);

/// Fold id (0..folds-1) for every instance: seeded shuffle, then per-class
/// round-robin with one running counter so both per-class and total fold
/// sizes differ by at most one.
std::vector<std::size_t> kfold_split(std::span<const int> labels, std::size_t classes, std::size_t folds,
                                     std::uint64_t seed);

/// Deterministic Fisher-Yates shuffle (independent of the standard library's
/// distribution implementations).
void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed);

struct SyntheticSpec {
    std::size_t samples = 60;
    std::size_t features = 7129;
    std::size_t classes = 2;
    std::size_t informative = 20;
    double noise = 0.05;
    double flip = 0.1;
    std::uint64_t seed = 0;
};

/// Two-state ("on"/"off") expression-like data: every feature sits near 0 or 1
/// plus Gaussian noise. Informative features (the first `informative`
/// columns) take a class-dependent state, flipped with probability `flip`;
/// the rest are independent coin flips.
Dataset make_synthetic(const SyntheticSpec& spec);

} // namespace adatsk
