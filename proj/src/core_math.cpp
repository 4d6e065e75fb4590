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
#include "adatsk/core_math.hpp"

#include "adatsk/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace adatsk::math {

namespace {

void require_non_empty(std::span<const double> v, const char* who) {
    if (v.empty()) {
        throw InvalidArgument(std::string(who) + ": empty membership vector");
    }
}

// Ascending copy, reused per thread to avoid an allocation per firing.
std::span<const double> sorted_view(std::span<const double> values) {
    thread_local std::vector<double> buffer;
    buffer.assign(values.begin(), values.end());
    std::sort(buffer.begin(), buffer.end());
    return buffer;
}

} // namespace

double gaussian_membership(double x, double center) {
    if (!std::isfinite(x) || !std::isfinite(center)) {
        throw InvalidArgument("gaussian_membership: non-finite input");
    }
    const double diff = x - center;
    return std::max(std::exp(-diff * diff), kMembershipFloor);
}

double product_firing(std::span<const double> mu) {
    require_non_empty(mu, "product_firing");
    // Power-of-two rescaling is exact, so the only inexact step past the
    // normal range is the final ldexp. Repeated subnormal products would
    // otherwise stick at the smallest subnormal instead of reaching 0.
    constexpr int kRescale = 512;
    const double threshold = std::ldexp(1.0, -kRescale);
    double f = 1.0;
    long long shift = 0;
    for (double v : mu) {
        f *= v;
        if (f != 0.0 && f < threshold) {
            f = std::ldexp(f, kRescale);
            shift += kRescale;
        }
    }
    if (shift == 0) return f;
    return shift > 2 * 1074 ? 0.0 : std::ldexp(f, static_cast<int>(-shift));
}

double power_sum_log(std::span<const double> log_values, int q) {
    double sum = 0.0;
    for (double l : sorted_view(log_values)) {
        sum += std::exp(q * l);
    }
    return sum;
}

double power_sum(std::span<const double> values, int q) {
    thread_local std::vector<double> logs;
    logs.resize(values.size());
    std::transform(values.begin(), values.end(), logs.begin(), [](double v) { return std::log(v); });
    return power_sum_log(logs, q);
}

double fixed_softmin(std::span<const double> values, int q) {
    require_non_empty(values, "fixed_softmin");
    thread_local std::vector<double> logs;
    logs.resize(values.size());
    std::transform(values.begin(), values.end(), logs.begin(), [](double v) { return std::log(v); });
    return fixed_softmin_log(logs, q);
}

double fixed_softmin_log(std::span<const double> log_values, int q) {
    require_non_empty(log_values, "fixed_softmin");
    if (q >= 0) {
        throw InvalidArgument("fixed_softmin: exponent must be negative, got " + std::to_string(q));
    }
    const double mean = power_sum_log(log_values, q) / static_cast<double>(log_values.size());
    return std::pow(mean, 1.0 / q);
}

AdaptiveExponent::AdaptiveExponent(int q) : q_(q) {
    if (q < kMinExponent || q > kMaxExponent) {
        throw InvalidArgument("adaptive exponent out of range: " + std::to_string(q));
    }
}

AdaptiveExponent adaptive_exponent(std::span<const double> mu) {
    require_non_empty(mu, "adaptive_exponent");
    const double lowest = *std::min_element(mu.begin(), mu.end());
    if (!(lowest > 0.0) || lowest > 1.0) {
        throw InvalidArgument("adaptive_exponent: memberships must lie in (0, 1]");
    }
    if (lowest == 1.0) {
        return AdaptiveExponent(kMinExponent);
    }
    const double raw = std::ceil(kExponentBudget / std::log(lowest));
    const double clamped = std::clamp(raw, double(kMinExponent), double(kMaxExponent));
    return AdaptiveExponent(static_cast<int>(clamped));
}

double ada_softmin_firing(std::span<const double> mu, AdaptiveExponent q) {
    require_non_empty(mu, "ada_softmin_firing");
    thread_local std::vector<double> logs;
    logs.resize(mu.size());
    std::transform(mu.begin(), mu.end(), logs.begin(), [](double v) { return std::log(v); });
    return ada_softmin_firing_log(mu, logs, q);
}

double ada_softmin_firing_log(std::span<const double> mu, std::span<const double> log_mu, AdaptiveExponent q) {
    require_non_empty(mu, "ada_softmin_firing");
    if (log_mu.size() != mu.size()) throw InvalidArgument("ada_softmin_firing: log table size mismatch");
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    const int e = q.value();
    const double mean = power_sum_log(log_mu, e) / static_cast<double>(mu.size());
    // Mathematically inside [min, max]; the clamp only absorbs rounding.
    return std::clamp(std::pow(mean, 1.0 / e), *lo, *hi);
}

double ada_softmin_firing(std::span<const double> mu) {
    return ada_softmin_firing(mu, adaptive_exponent(mu));
}

double gate_value(double lambda) {
    return lambda * std::sqrt(std::exp(1.0 - lambda * lambda));
}

double gate_derivative(double lambda) {
    const double s = 1.0 - lambda * lambda;
    return s * std::sqrt(std::exp(s));
}

double legacy_gate_value(LegacyGate kind, double lambda) {
    switch (kind) {
    case LegacyGate::sigmoid:
        return 1.0 / (1.0 + std::exp(-lambda));
    case LegacyGate::one_minus_exp:
        return 1.0 - std::exp(-lambda * lambda);
    case LegacyGate::exp_sq:
        return std::exp(-lambda * lambda);
    }
    throw InvalidArgument("legacy_gate_value: unknown gate kind");
}

double legacy_gate_derivative(LegacyGate kind, double lambda) {
    switch (kind) {
    case LegacyGate::sigmoid: {
        const double s = 1.0 / (1.0 + std::exp(-lambda));
        return s * (1.0 - s);
    }
    case LegacyGate::one_minus_exp:
        return 2.0 * lambda * std::exp(-lambda * lambda);
    case LegacyGate::exp_sq:
        return -2.0 * lambda * std::exp(-lambda * lambda);
    }
    throw InvalidArgument("legacy_gate_derivative: unknown gate kind");
}

namespace {

LegacyGate as_legacy(GateKind kind) {
    switch (kind) {
    case GateKind::sigmoid:
        return LegacyGate::sigmoid;
    case GateKind::one_minus_exp:
        return LegacyGate::one_minus_exp;
    case GateKind::exp_sq:
        return LegacyGate::exp_sq;
    case GateKind::proposed:
        break;
    }
    throw InvalidArgument("not a legacy gate kind");
}

} // namespace

double gate_value(GateKind kind, double lambda) {
    return kind == GateKind::proposed ? gate_value(lambda) : legacy_gate_value(as_legacy(kind), lambda);
}

double gate_derivative(GateKind kind, double lambda) {
    return kind == GateKind::proposed ? gate_derivative(lambda)
                                      : legacy_gate_derivative(as_legacy(kind), lambda);
}

GateKind parse_gate_kind(std::string_view name) {
    if (name == "proposed") return GateKind::proposed;
    if (name == "sigmoid") return GateKind::sigmoid;
    if (name == "one-minus-exp") return GateKind::one_minus_exp;
    if (name == "exp-sq") return GateKind::exp_sq;
    throw InvalidArgument("unknown gate kind '" + std::string(name) + "'");
}

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::proposed:
        return "proposed";
    case GateKind::sigmoid:
        return "sigmoid";
    case GateKind::one_minus_exp:
        return "one-minus-exp";
    case GateKind::exp_sq:
        return "exp-sq";
    }
    return "unknown";
}

} // namespace adatsk::math
