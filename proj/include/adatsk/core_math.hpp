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

// Scalar numerics for the fuzzy inference engine: Gaussian memberships,
// firing-strength operators (product, fixed softmin, adaptive softmin) and
// the gate function family used for feature selection / rule extraction.

#include <span>
#include <string_view>

namespace adatsk::math {

/// Lower clamp applied to every membership value so that ln(min mu) stays finite.
inline constexpr double kMembershipFloor = 1e-300;

/// Bounds for the adaptive softmin exponent.
inline constexpr int kMinExponent = -1000;
inline constexpr int kMaxExponent = -1;

/// Numerator of the adaptive exponent: ln(1e300) rounded down.
inline constexpr double kExponentBudget = 690.0;

/// exp(-(x - m)^2), floor-clamped to kMembershipFloor. Throws InvalidArgument
/// on non-finite input.
double gaussian_membership(double x, double center);

/// Product T-norm, rounded once at the end. Underflows to 0 for long vectors;
/// kept as a baseline.
double product_firing(std::span<const double> mu);

/// Power mean ((sum v^q) / D)^(1/q) with a caller-chosen negative exponent.
/// No rescue is attempted: v^q may overflow to inf and the result collapses to 0.
double fixed_softmin(std::span<const double> values, int q);
/// fixed_softmin from the natural logs of the values.
double fixed_softmin_log(std::span<const double> log_values, int q);

/// Negative integer exponent in [kMinExponent, kMaxExponent].
class AdaptiveExponent {
public:
    explicit AdaptiveExponent(int q);
    int value() const noexcept { return q_; }
    friend bool operator==(AdaptiveExponent, AdaptiveExponent) = default;

private:
    int q_;
};

/// ceil(690 / ln(min mu)) clamped to [-1000, -1]; -1000 when every entry is 1.
AdaptiveExponent adaptive_exponent(std::span<const double> mu);

/// Sum of v^q over the entries, accumulated in ascending order of v so the
/// result does not depend on the ordering of the input.
double power_sum(std::span<const double> values, int q);

/// Same sum from precomputed natural logs: sum of exp(q * l). power_sum
/// evaluates through this, so both agree bit for bit given identical logs.
double power_sum_log(std::span<const double> log_values, int q);

/// Softmin evaluated with the adaptive exponent. The result always lies in
/// [min(mu), max(mu)].
double ada_softmin_firing(std::span<const double> mu);

/// Same as ada_softmin_firing but with the exponent supplied by the caller
/// (used when exponents are cached for frozen antecedents).
double ada_softmin_firing(std::span<const double> mu, AdaptiveExponent q);
/// As above with log(mu) supplied; identical result when log_mu[i] == std::log(mu[i]).
double ada_softmin_firing_log(std::span<const double> mu, std::span<const double> log_mu, AdaptiveExponent q);

/// Gate M(lambda) = lambda * sqrt(exp(1 - lambda^2)). Odd, range [-1, 1].
double gate_value(double lambda);

/// dM/dlambda = (1 - lambda^2) * sqrt(exp(1 - lambda^2)).
double gate_derivative(double lambda);

enum class LegacyGate { sigmoid, one_minus_exp, exp_sq };

double legacy_gate_value(LegacyGate kind, double lambda);
double legacy_gate_derivative(LegacyGate kind, double lambda);

/// Gate family selector used by the trainer. `proposed` is M(lambda) above.
enum class GateKind { proposed, sigmoid, one_minus_exp, exp_sq };

double gate_value(GateKind kind, double lambda);
double gate_derivative(GateKind kind, double lambda);

/// Accepts "proposed", "sigmoid", "one-minus-exp", "exp-sq".
GateKind parse_gate_kind(std::string_view name);
std::string_view to_string(GateKind kind);

} // namespace adatsk::math
