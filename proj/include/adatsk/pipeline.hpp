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

// Three-phase training: (i) feature selection with per-feature consequent
// gates on a compact rule base, (ii) rule extraction with per-rule gates on
// the enhanced rule base over the selected features, (iii) gate-free fine
// tuning. Also the plain ungated classifier and cross-validation.

#include "adatsk/data.hpp"
#include "adatsk/model.hpp"
#include "adatsk/training.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace adatsk {

struct PhaseResult {
    TskModel model;
    GateBank gates;                  // state at termination
    std::vector<double> losses;      // see GdRun::losses
    Matrix gate_trajectory;          // per-iteration M(.) values
    std::vector<std::size_t> selected_features; // phase (i)
    std::vector<std::size_t> retained_rules;    // phase (ii)
    double threshold = 0.0;
    double seconds = 0.0;
};

/// tau = max(g) - zeta * (max(g) - min(g)), computed over |g| in absolute mode.
double gate_threshold(std::span<const double> gate_values, double zeta, ThresholdMode mode = ThresholdMode::absolute);
double threshold_lambda(std::span<const double> gate_values, double zeta_lambda);
double threshold_theta(std::span<const double> gate_values, double zeta_theta);

/// Phase (i). `train` must already be normalized.
PhaseResult run_phase_fs(const Dataset& train, const TrainConfig& config);

/// Phase (ii) on the selected-feature view of the training data.
/// `original_dims` decides whether centers are trained.
PhaseResult run_phase_re(const Dataset& reduced_train, const TrainConfig& config, std::size_t original_dims);

/// Phase (iii): drops the gates (folding M(theta_r) into rule r's consequent)
/// and fine-tunes by GD or solves the consequents by least squares.
PhaseResult run_phase_ft(const Dataset& reduced_train, const PhaseResult& extraction, const TrainConfig& config,
                         std::size_t original_dims);

struct PipelineResult {
    PhaseResult fs;
    PhaseResult re;
    PhaseResult ft;

    const TskModel& model() const noexcept { return ft.model; }
    const std::vector<std::size_t>& selected_features() const noexcept { return fs.selected_features; }
};

PipelineResult run_pipeline(const Dataset& train, const TrainConfig& config);

/// Ungated compact rule base with `config.sets_plain` sets per feature,
/// trained by GD with `config.tnorm`.
PhaseResult run_plain(const Dataset& train, const TrainConfig& config);

/// A trained classifier together with everything needed to apply it to raw
/// feature values.
struct Classifier {
    std::vector<std::string> feature_names;  // selected features, in model order
    std::vector<std::size_t> feature_columns; // their indices in the training data
    std::vector<std::string> class_names;
    NormalizationStats normalization;         // over the selected features
    TskModel model;
    TNorm tnorm;

    /// `raw` holds the selected features only, in model order.
    std::vector<std::size_t> predict(const Matrix& raw) const;
    /// Picks the selected columns out of a full feature matrix first.
    std::vector<std::size_t> predict_full(const Matrix& raw_all) const;
    Matrix outputs(const Matrix& raw) const;
};

enum class Method { fsre, plain };

struct FitResult {
    Classifier classifier;
    PipelineResult phases;  // populated for Method::fsre
    PhaseResult plain;      // populated for Method::plain
};

/// Normalizes with statistics from `raw_train` and trains.
FitResult fit(const Dataset& raw_train, const TrainConfig& config, Method method,
              NormalizationMode normalization = NormalizationMode::minmax);

double accuracy(std::span<const std::size_t> predicted, std::span<const int> labels);

struct RunRecord {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    double accuracy = 0.0;
    double train_accuracy = 0.0;
    std::size_t selected_features = 0;
    std::size_t rules = 0;
    double seconds_fs = 0.0;
    double seconds_re = 0.0;
    double seconds_ft = 0.0;
};

struct PipelineReport {
    std::size_t folds = 0;
    std::size_t repeats = 0;
    std::vector<RunRecord> runs;
    double mean_accuracy = 0.0;
    double mean_train_accuracy = 0.0;
    double mean_selected_features = 0.0;
    double mean_rules = 0.0;
};

/// Stratified k-fold cross-validation repeated `repeats` times; repeat k uses
/// fold seed config.seed + k. Runs execute concurrently; results are ordered
/// by (repeat, fold).
PipelineReport cross_validate(const Dataset& raw, const TrainConfig& config, std::size_t folds, std::size_t repeats,
                              Method method = Method::fsre, NormalizationMode normalization = NormalizationMode::minmax);

} // namespace adatsk
