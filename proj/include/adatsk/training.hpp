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

// Batch evaluation, analytic gradients of the mean-square loss for every
// trainable family (centers, consequents, feature gates, rule gates),
// plain gradient descent, and least-squares consequent estimation.

#include "adatsk/model.hpp"
#include "adatsk/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adatsk {

enum class FineTuneMode { gd, lse };
enum class ThresholdMode { absolute, raw };

std::string_view to_string(FineTuneMode mode);
FineTuneMode parse_fine_tune_mode(std::string_view name);
std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view name);

struct TrainConfig {
    double eta = 0.01;
    // Unset counts resolve to 1000 (low-dimensional) or 200 (high-dimensional).
    std::optional<std::size_t> iters_fs;
    std::optional<std::size_t> iters_re;
    std::optional<std::size_t> iters_ft;
    std::optional<std::size_t> iters_plain;
    std::size_t batch_size = 0; // 0 or >= N means full batch
    std::size_t sets_fs = 10;
    std::size_t sets_re = 5;
    std::size_t sets_plain = 3;
    // Unset thresholds resolve to 0.5/0.3 (low-dim) or 0.4/0.5 (high-dim).
    std::optional<double> zeta_lambda;
    std::optional<double> zeta_theta;
    std::size_t high_dim_threshold = 1000;
    // Unset: centers are frozen exactly when the data is high-dimensional.
    std::optional<bool> freeze_centers;
    double gate_init = 0.01;
    math::GateKind gate_kind = math::GateKind::proposed;
    FineTuneMode fine_tune = FineTuneMode::gd;
    ThresholdMode threshold_mode = ThresholdMode::absolute;
    TNorm tnorm{};
    std::uint64_t seed = 0;

    bool high_dimensional(std::size_t features) const noexcept { return features > high_dim_threshold; }
    bool centers_frozen(std::size_t features) const noexcept {
        return freeze_centers.value_or(high_dimensional(features));
    }
    std::size_t iterations_fs(std::size_t features) const;
    std::size_t iterations_re(std::size_t features) const;
    std::size_t iterations_ft(std::size_t features) const;
    std::size_t iterations_plain(std::size_t features) const;
    double zeta_lambda_for(std::size_t features) const;
    double zeta_theta_for(std::size_t features) const;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// Firing strengths of every (instance, rule) pair of a batch.
struct FiringTable {
    Matrix firing;       // N x R
    Matrix normalized;   // N x R
    IntMatrix exponents; // N x R softmin exponents; empty for product
    TNorm tnorm;
    bool frozen = false; // computed once for fixed centers and reused

    FiringTable rows(Eigen::Index begin, Eigen::Index count) const;
};

/// Throws DegenerateFiring if every rule has zero firing for some instance.
/// With `normalize` false only the raw strengths are filled in and nothing is
/// thrown for all-zero rows.
FiringTable compute_firing(const Matrix& features, const TskModel& model, const TNorm& tnorm,
                           const IntMatrix* fixed_exponents = nullptr, bool normalize = true);

/// Everything the gradient routines need from one forward pass over a batch.
struct BatchEvaluation {
    FiringTable firing;
    Matrix design;        // N x (D+1): [1, M(lambda_d) x_d]
    Matrix rule_outputs;  // N x (R*C): block r holds design * P_r, before the rule gate
    Vector rule_gates;    // M(theta_r), or 1
    Matrix outputs;       // N x C system output
    Matrix residual;      // (outputs - targets) / N, i.e. dE/dy
    double loss = 0.0;

    /// Gated y_r^c for sample n.
    double rule_output(Eigen::Index n, Eigen::Index r, Eigen::Index c) const;
};

BatchEvaluation evaluate_batch(const Matrix& features, const Matrix& targets, const TskModel& model,
                               const GateBank& gates, const TNorm& tnorm, const FiringTable* cached = nullptr);

/// dE/dp in the layout of ConsequentBank::data().
Eigen::MatrixXd grad_consequents(const Matrix& features, const BatchEvaluation& eval, const TskModel& model,
                                 const GateBank& gates);

/// Center gradient for softmin-family firing (adaptive or fixed exponent),
/// exponent held at the value used in the forward pass. D x S, contributions of
/// every rule sharing a fuzzy set are summed.
Matrix grad_centers_ada(const Matrix& features, const BatchEvaluation& eval, const TskModel& model);

/// Center gradient for the product T-norm.
Matrix grad_centers_product(const Matrix& features, const BatchEvaluation& eval, const TskModel& model);

/// Dispatches on the T-norm recorded in the evaluation.
Matrix grad_centers(const Matrix& features, const BatchEvaluation& eval, const TskModel& model);

Vector grad_lambda(const Matrix& features, const BatchEvaluation& eval, const TskModel& model, const GateBank& gates);
Vector grad_theta(const BatchEvaluation& eval, const TskModel& model, const GateBank& gates);

struct GradientSet {
    Matrix centers;              // D x S; empty when centers are frozen
    Eigen::MatrixXd consequents; // ConsequentBank::data() layout
    Vector lambda;               // empty unless feature-gated
    Vector theta;                // empty unless rule-gated
};

GradientSet compute_gradients(const Matrix& features, const BatchEvaluation& eval, const TskModel& model,
                              const GateBank& gates, bool train_centers);

/// params -= eta * grads, elementwise.
void gd_update(std::span<double> params, std::span<const double> grads, double eta);

/// Applies one update to every family present in `grads`.
void gd_step(TskModel& model, GateBank& gates, const GradientSet& grads, double eta);

inline constexpr double kLseRidge = 1e-8;

/// Ridge-regularized least squares for all consequents given fixed normalized
/// firing strengths (N x R).
ConsequentBank lse_consequents(const Matrix& features, const Matrix& targets, const Matrix& normalized_firing,
                               double ridge = kLseRidge);

struct GdOptions {
    double eta = 0.01;
    std::size_t iterations = 0;
    std::size_t batch_size = 0;
    bool train_centers = true;
    bool record_gates = false;
    std::string phase = "training";
};

struct GdRun {
    std::vector<double> losses; // loss before each update, then the final loss
    Matrix gate_trajectory;     // row k: M(.) after update k+1 (when recorded)
};

/// Full-batch (or cyclic mini-batch) gradient descent. With frozen centers the
/// firing table, including adaptive exponents, is computed once and reused.
/// Throws TrainingDiverged on a non-finite loss.
GdRun train_gd(const Matrix& features, const Matrix& targets, TskModel& model, GateBank& gates, const TNorm& tnorm,
               const GdOptions& options);

} // namespace adatsk
