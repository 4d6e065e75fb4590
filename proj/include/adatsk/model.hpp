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

// Forward inference of a first-order TSK classifier: memberships, firing
// strengths, normalization, (gated) rule outputs, system output and loss.

#include "adatsk/core_math.hpp"
#include "adatsk/rulebase.hpp"
#include "adatsk/types.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace adatsk {

enum class TNormKind { product, softmin, ada_softmin };

/// Firing-strength operator. `q` is only used by the fixed softmin.
struct TNorm {
    TNormKind kind = TNormKind::ada_softmin;
    int q = -12;

    friend bool operator==(const TNorm&, const TNorm&) = default;
};

/// Accepts "product", "softmin", "ada-softmin".
TNorm parse_tnorm(std::string_view name, int q = -12);
std::string_view to_string(TNormKind kind);

enum class GateMode { ungated, feature_gated, rule_gated };

std::string_view to_string(GateMode mode);

/// Trainable consequent gates. Only one family is active at a time: lambda
/// (one per feature) in feature-gated mode, theta (one per rule) in
/// rule-gated mode.
struct GateBank {
    GateMode mode = GateMode::ungated;
    math::GateKind kind = math::GateKind::proposed;
    Vector lambda;
    Vector theta;

    static GateBank ungated();
    static GateBank feature_gated(std::size_t features, double init, math::GateKind kind = math::GateKind::proposed);
    static GateBank rule_gated(std::size_t rules, double init, math::GateKind kind = math::GateKind::proposed);

    /// Multiplier applied to feature d's consequent terms (1 unless feature-gated).
    double feature_gate(std::size_t d) const;
    /// Multiplier applied to the whole consequent of rule r (1 unless rule-gated).
    double rule_gate(std::size_t r) const;

    /// M(.) of the active family, in parameter order.
    Vector gate_values() const;
};

struct TskModel {
    FuzzyPartition partition;
    IndexMatrix rules;
    ConsequentBank consequents;

    std::size_t features() const noexcept { return rules.cols(); }
    std::size_t rule_count() const noexcept { return rules.rows(); }
    std::size_t classes() const noexcept { return consequents.classes(); }

    /// Throws InvalidArgument when the three parts disagree on shape.
    void validate() const;
};

struct ForwardTrace {
    Matrix memberships;         // R x D
    Vector firing;              // f_r
    Vector normalized;          // f_r / sum f
    Matrix rule_outputs;        // R x C, gates applied
    Vector output;              // C
    std::vector<int> exponents; // per-rule softmin exponent; empty for product
};

/// Single-sample forward pass. `fixed_exponents`, when non-empty, overrides
/// the adaptive exponent per rule (ada-softmin only).
ForwardTrace forward(std::span<const double> x, const TskModel& model, const GateBank& gates, const TNorm& tnorm,
                     std::span<const int> fixed_exponents = {});

/// f / sum(f). Throws DegenerateFiring when the sum is zero.
Vector normalize_firing(std::span<const double> firing);

/// (1 / 2N) * sum_n sum_c (y - t)^2.
double mse_loss(const Matrix& outputs, const Matrix& targets);

/// Index of the largest entry; ties go to the smallest index.
std::size_t argmax_class(std::span<const double> output);

/// Ungated ada-softmin classification of one normalized sample.
std::size_t predict(std::span<const double> x, const TskModel& model, const TNorm& tnorm = {});

} // namespace adatsk
