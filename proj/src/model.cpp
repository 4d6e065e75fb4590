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
#include "adatsk/model.hpp"

#include "adatsk/error.hpp"

#include <cmath>
#include <string>

namespace adatsk {

TNorm parse_tnorm(std::string_view name, int q) {
    if (name == "product") return {TNormKind::product, q};
    if (name == "softmin") {
        if (q >= 0) throw InvalidArgument("softmin exponent must be negative");
        return {TNormKind::softmin, q};
    }
    if (name == "ada-softmin" || name == "ada") return {TNormKind::ada_softmin, q};
    throw InvalidArgument("unknown t-norm '" + std::string(name) + "'");
}

std::string_view to_string(TNormKind kind) {
    switch (kind) {
    case TNormKind::product:
        return "product";
    case TNormKind::softmin:
        return "softmin";
    case TNormKind::ada_softmin:
        return "ada-softmin";
    }
    return "unknown";
}

std::string_view to_string(GateMode mode) {
    switch (mode) {
    case GateMode::ungated:
        return "ungated";
    case GateMode::feature_gated:
        return "feature-gated";
    case GateMode::rule_gated:
        return "rule-gated";
    }
    return "unknown";
}

GateBank GateBank::ungated() { return {}; }

GateBank GateBank::feature_gated(std::size_t features, double init, math::GateKind kind) {
    GateBank g;
    g.mode = GateMode::feature_gated;
    g.kind = kind;
    g.lambda = Vector::Constant(static_cast<Eigen::Index>(features), init);
    return g;
}

GateBank GateBank::rule_gated(std::size_t rules, double init, math::GateKind kind) {
    GateBank g;
    g.mode = GateMode::rule_gated;
    g.kind = kind;
    g.theta = Vector::Constant(static_cast<Eigen::Index>(rules), init);
    return g;
}

double GateBank::feature_gate(std::size_t d) const {
    return mode == GateMode::feature_gated ? math::gate_value(kind, lambda(static_cast<Eigen::Index>(d))) : 1.0;
}

double GateBank::rule_gate(std::size_t r) const {
    return mode == GateMode::rule_gated ? math::gate_value(kind, theta(static_cast<Eigen::Index>(r))) : 1.0;
}

Vector GateBank::gate_values() const {
    const Vector& params = mode == GateMode::feature_gated ? lambda : theta;
    if (mode == GateMode::ungated) return {};
    return params.unaryExpr([this](double v) { return math::gate_value(kind, v); });
}

void TskModel::validate() const {
    if (partition.features() != rules.cols()) {
        throw InvalidArgument("model: partition has " + std::to_string(partition.features()) +
                              " features but the rule base has " + std::to_string(rules.cols()));
    }
    if (consequents.rules() != rules.rows() || consequents.features() != rules.cols()) {
        throw InvalidArgument("model: consequent bank shape does not match the rule base");
    }
    for (std::size_t r = 0; r < rules.rows(); ++r) {
        for (int s : rules.row(r)) {
            if (s < 1 || static_cast<std::size_t>(s) > partition.sets()) {
                throw InvalidArgument("model: rule " + std::to_string(r) + " references fuzzy set " +
                                      std::to_string(s) + " of " + std::to_string(partition.sets()));
            }
        }
    }
}

namespace {

void check_gates(const GateBank& gates, const TskModel& model) {
    if (gates.mode == GateMode::feature_gated && static_cast<std::size_t>(gates.lambda.size()) != model.features()) {
        throw InvalidArgument("forward: feature gate count does not match D");
    }
    if (gates.mode == GateMode::rule_gated && static_cast<std::size_t>(gates.theta.size()) != model.rule_count()) {
        throw InvalidArgument("forward: rule gate count does not match R");
    }
}

} // namespace

ForwardTrace forward(std::span<const double> x, const TskModel& model, const GateBank& gates, const TNorm& tnorm,
                     std::span<const int> fixed_exponents) {
    model.validate();
    check_gates(gates, model);
    const std::size_t R = model.rule_count();
    const std::size_t D = model.features();
    const std::size_t C = model.classes();
    if (x.size() != D) {
        throw InvalidArgument("forward: sample has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(D));
    }
    if (!fixed_exponents.empty() && fixed_exponents.size() != R) {
        throw InvalidArgument("forward: exponent override must have one entry per rule");
    }

    ForwardTrace t;
    t.memberships.resize(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(D));
    t.firing.resize(static_cast<Eigen::Index>(R));
    if (tnorm.kind != TNormKind::product) t.exponents.resize(R);

    for (std::size_t r = 0; r < R; ++r) {
        auto mu = t.memberships.row(static_cast<Eigen::Index>(r));
        for (std::size_t d = 0; d < D; ++d) {
            mu(static_cast<Eigen::Index>(d)) = math::gaussian_membership(x[d], model.partition.center(model.rules, r, d));
        }
        std::span<const double> row(mu.data(), D);
        double f = 0.0;
        switch (tnorm.kind) {
        case TNormKind::product:
            f = math::product_firing(row);
            break;
        case TNormKind::softmin:
            f = math::fixed_softmin(row, tnorm.q);
            t.exponents[r] = tnorm.q;
            break;
        case TNormKind::ada_softmin: {
            const auto q = fixed_exponents.empty() ? math::adaptive_exponent(row)
                                                   : math::AdaptiveExponent(fixed_exponents[r]);
            f = math::ada_softmin_firing(row, q);
            t.exponents[r] = q.value();
            break;
        }
        }
        t.firing(static_cast<Eigen::Index>(r)) = f;
    }
    t.normalized = normalize_firing({t.firing.data(), R});

    t.rule_outputs.resize(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(C));
    t.output = Vector::Zero(static_cast<Eigen::Index>(C));
    for (std::size_t r = 0; r < R; ++r) {
        const double rule_gate = gates.rule_gate(r);
        for (std::size_t c = 0; c < C; ++c) {
            double y = model.consequents(r, 0, c);
            for (std::size_t d = 0; d < D; ++d) {
                y += gates.feature_gate(d) * model.consequents(r, d + 1, c) * x[d];
            }
            y *= rule_gate;
            t.rule_outputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = y;
            t.output(static_cast<Eigen::Index>(c)) += t.normalized(static_cast<Eigen::Index>(r)) * y;
        }
    }
    return t;
}

Vector normalize_firing(std::span<const double> firing) {
    double total = 0.0;
    for (double f : firing) {
        if (!std::isfinite(f) || f < 0.0) {
            throw InvalidArgument("normalize_firing: firing strengths must be finite and non-negative");
        }
        total += f;
    }
    if (!(total > 0.0)) {
        throw DegenerateFiring("all firing strengths are zero (numeric underflow)");
    }
    Vector out(static_cast<Eigen::Index>(firing.size()));
    for (std::size_t r = 0; r < firing.size(); ++r) {
        out(static_cast<Eigen::Index>(r)) = firing[r] / total;
    }
    return out;
}

double mse_loss(const Matrix& outputs, const Matrix& targets) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols()) {
        throw InvalidArgument("mse_loss: output and target shapes differ");
    }
    if (outputs.rows() == 0) return 0.0;
    return (outputs - targets).squaredNorm() / (2.0 * static_cast<double>(outputs.rows()));
}

std::size_t argmax_class(std::span<const double> output) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < output.size(); ++c) {
        if (output[c] > output[best]) best = c;
    }
    return best;
}

std::size_t predict(std::span<const double> x, const TskModel& model, const TNorm& tnorm) {
    const auto trace = forward(x, model, GateBank::ungated(), tnorm);
    return argmax_class({trace.output.data(), static_cast<std::size_t>(trace.output.size())});
}

} // namespace adatsk
