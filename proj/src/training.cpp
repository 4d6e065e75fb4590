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
#include "adatsk/training.hpp"

#include "adatsk/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adatsk {

std::string_view to_string(FineTuneMode mode) { return mode == FineTuneMode::gd ? "gd" : "lse"; }

FineTuneMode parse_fine_tune_mode(std::string_view name) {
    if (name == "gd") return FineTuneMode::gd;
    if (name == "lse") return FineTuneMode::lse;
    throw InvalidArgument("unknown fine-tune mode '" + std::string(name) + "'");
}

std::string_view to_string(ThresholdMode mode) { return mode == ThresholdMode::absolute ? "absolute" : "raw"; }

ThresholdMode parse_threshold_mode(std::string_view name) {
    if (name == "absolute") return ThresholdMode::absolute;
    if (name == "raw") return ThresholdMode::raw;
    throw InvalidArgument("unknown threshold mode '" + std::string(name) + "'");
}

namespace {

std::size_t default_iterations(const TrainConfig& c, std::size_t features) {
    return c.high_dimensional(features) ? 200 : 1000;
}

} // namespace

std::size_t TrainConfig::iterations_fs(std::size_t features) const {
    return iters_fs.value_or(default_iterations(*this, features));
}
std::size_t TrainConfig::iterations_re(std::size_t features) const {
    return iters_re.value_or(default_iterations(*this, features));
}
std::size_t TrainConfig::iterations_ft(std::size_t features) const {
    return iters_ft.value_or(default_iterations(*this, features));
}
std::size_t TrainConfig::iterations_plain(std::size_t features) const {
    return iters_plain.value_or(default_iterations(*this, features));
}

double TrainConfig::zeta_lambda_for(std::size_t features) const {
    return zeta_lambda.value_or(high_dimensional(features) ? 0.4 : 0.5);
}

double TrainConfig::zeta_theta_for(std::size_t features) const {
    return zeta_theta.value_or(high_dimensional(features) ? 0.5 : 0.3);
}

void TrainConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be positive");
    auto check_zeta = [](const std::optional<double>& z, const char* name) {
        if (z && !(*z > 0.0 && *z < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1)");
    };
    check_zeta(zeta_lambda, "zeta_lambda");
    check_zeta(zeta_theta, "zeta_theta");
    auto check_count = [](const std::optional<std::size_t>& n, const char* name) {
        if (n && *n == 0) throw InvalidArgument(std::string(name) + " must be positive");
    };
    check_count(iters_fs, "iters_fs");
    check_count(iters_re, "iters_re");
    check_count(iters_plain, "iters_plain");
    // iters_ft may be zero: fine tuning is then skipped.
    if (sets_fs == 0 || sets_plain == 0) throw InvalidArgument("fuzzy set counts must be positive");
    if (sets_re < 2) throw InvalidArgument("sets_re must be at least 2");
    if (!std::isfinite(gate_init)) throw InvalidArgument("gate_init must be finite");
    if (tnorm.kind == TNormKind::softmin && tnorm.q >= 0) throw InvalidArgument("softmin exponent must be negative");
}

FiringTable FiringTable::rows(Eigen::Index begin, Eigen::Index count) const {
    FiringTable out;
    out.firing = firing.middleRows(begin, count);
    out.normalized = normalized.middleRows(begin, count);
    if (exponents.size() > 0) out.exponents = exponents.middleRows(begin, count);
    out.tnorm = tnorm;
    out.frozen = frozen;
    return out;
}

FiringTable compute_firing(const Matrix& features, const TskModel& model, const TNorm& tnorm,
                           const IntMatrix* fixed_exponents, bool normalize) {
    model.validate();
    const Eigen::Index N = features.rows();
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const std::size_t D = model.features();
    const Eigen::Index S = static_cast<Eigen::Index>(model.partition.sets());
    if (static_cast<std::size_t>(features.cols()) != D) {
        throw InvalidArgument("compute_firing: feature count does not match the model");
    }
    if (fixed_exponents && (fixed_exponents->rows() != N || fixed_exponents->cols() != R)) {
        throw InvalidArgument("compute_firing: exponent table shape mismatch");
    }

    FiringTable table;
    table.tnorm = tnorm;
    table.firing.resize(N, R);
    if (normalize) table.normalized.resize(N, R);
    if (tnorm.kind != TNormKind::product) table.exponents.resize(N, R);

    Matrix mu_table(static_cast<Eigen::Index>(D), S);
    Matrix log_table(static_cast<Eigen::Index>(D), S);
    std::vector<double> mu(D);
    std::vector<double> log_mu(D);
    for (Eigen::Index n = 0; n < N; ++n) {
        for (std::size_t d = 0; d < D; ++d) {
            for (Eigen::Index s = 0; s < S; ++s) {
                const double v = math::gaussian_membership(features(n, static_cast<Eigen::Index>(d)),
                                                           model.partition.centers(static_cast<Eigen::Index>(d), s));
                mu_table(static_cast<Eigen::Index>(d), s) = v;
                log_table(static_cast<Eigen::Index>(d), s) = std::log(v);
            }
        }
        for (Eigen::Index r = 0; r < R; ++r) {
            const auto idx = model.rules.row(static_cast<std::size_t>(r));
            for (std::size_t d = 0; d < D; ++d) {
                mu[d] = mu_table(static_cast<Eigen::Index>(d), idx[d] - 1);
                log_mu[d] = log_table(static_cast<Eigen::Index>(d), idx[d] - 1);
            }
            double f = 0.0;
            switch (tnorm.kind) {
            case TNormKind::product:
                f = math::product_firing(mu);
                break;
            case TNormKind::softmin:
                f = math::fixed_softmin_log(log_mu, tnorm.q);
                table.exponents(n, r) = tnorm.q;
                break;
            case TNormKind::ada_softmin: {
                const auto q = fixed_exponents ? math::AdaptiveExponent((*fixed_exponents)(n, r))
                                               : math::adaptive_exponent(mu);
                f = math::ada_softmin_firing_log(mu, log_mu, q);
                table.exponents(n, r) = q.value();
                break;
            }
            }
            table.firing(n, r) = f;
        }
        if (normalize) table.normalized.row(n) = normalize_firing({table.firing.row(n).data(), static_cast<std::size_t>(R)});
    }
    return table;
}

double BatchEvaluation::rule_output(Eigen::Index n, Eigen::Index r, Eigen::Index c) const {
    const Eigen::Index C = outputs.cols();
    return rule_gates(r) * rule_outputs(n, r * C + c);
}

BatchEvaluation evaluate_batch(const Matrix& features, const Matrix& targets, const TskModel& model,
                               const GateBank& gates, const TNorm& tnorm, const FiringTable* cached) {
    const Eigen::Index N = features.rows();
    const Eigen::Index D = features.cols();
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index C = static_cast<Eigen::Index>(model.classes());
    if (targets.rows() != N || targets.cols() != C) {
        throw InvalidArgument("evaluate_batch: target shape does not match N x C");
    }
    if (gates.mode == GateMode::feature_gated && gates.lambda.size() != D) {
        throw InvalidArgument("evaluate_batch: feature gate count does not match D");
    }
    if (gates.mode == GateMode::rule_gated && gates.theta.size() != R) {
        throw InvalidArgument("evaluate_batch: rule gate count does not match R");
    }

    BatchEvaluation eval;
    if (cached) {
        if (cached->firing.rows() != N || cached->firing.cols() != R) {
            throw InvalidArgument("evaluate_batch: cached firing table shape mismatch");
        }
        eval.firing = *cached;
    } else {
        eval.firing = compute_firing(features, model, tnorm);
    }

    eval.design.resize(N, D + 1);
    eval.design.col(0).setOnes();
    for (Eigen::Index d = 0; d < D; ++d) {
        eval.design.col(d + 1) = gates.feature_gate(static_cast<std::size_t>(d)) * features.col(d);
    }

    eval.rule_gates.resize(R);
    eval.rule_outputs.resize(N, R * C);
    eval.outputs = Matrix::Zero(N, C);
    for (Eigen::Index r = 0; r < R; ++r) {
        eval.rule_gates(r) = gates.rule_gate(static_cast<std::size_t>(r));
        auto block = eval.rule_outputs.middleCols(r * C, C);
        block.noalias() = eval.design * model.consequents.rule(static_cast<std::size_t>(r));
        eval.outputs.noalias() += (eval.rule_gates(r) * eval.firing.normalized.col(r)).asDiagonal() * block;
    }
    const Matrix diff = eval.outputs - targets;
    eval.loss = N > 0 ? diff.squaredNorm() / (2.0 * static_cast<double>(N)) : 0.0;
    eval.residual = N > 0 ? Matrix(diff / static_cast<double>(N)) : diff;
    return eval;
}

namespace {

void check_gate_shapes(const TskModel& model, const GateBank& gates) {
    if (gates.mode == GateMode::feature_gated && static_cast<std::size_t>(gates.lambda.size()) != model.features()) {
        throw InvalidArgument("gate bank does not match the model's feature count");
    }
    if (gates.mode == GateMode::rule_gated && static_cast<std::size_t>(gates.theta.size()) != model.rule_count()) {
        throw InvalidArgument("gate bank does not match the model's rule count");
    }
}

// Residual weighted by the normalized firing of rule r: diag(fbar_r) * dE/dy.
Matrix weighted_residual(const BatchEvaluation& eval, Eigen::Index r) {
    return eval.firing.normalized.col(r).asDiagonal() * eval.residual;
}

template <typename Weight>
Matrix accumulate_center_gradient(const Matrix& features, const BatchEvaluation& eval, const TskModel& model,
                                  Weight&& weight) {
    if (eval.firing.frozen) {
        throw InvalidState("center gradient requested while centers are frozen");
    }
    const Eigen::Index N = features.rows();
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index C = static_cast<Eigen::Index>(model.classes());
    const std::size_t D = model.features();
    const Eigen::Index S = model.partition.centers.cols();
    Matrix grad = Matrix::Zero(model.partition.centers.rows(), S);
    Matrix log_table(static_cast<Eigen::Index>(D), S);
    std::vector<double> log_mu(D);
    std::vector<double> coefs(static_cast<std::size_t>(R));
    for (Eigen::Index n = 0; n < N; ++n) {
        bool any = false;
        for (Eigen::Index r = 0; r < R; ++r) {
            // sum_c dE/dy^c * (y_r^c - y^c) * fbar_r == dE/df_r * f_r
            double coef = 0.0;
            for (Eigen::Index c = 0; c < C; ++c) {
                coef += eval.residual(n, c) * (eval.rule_output(n, r, c) - eval.outputs(n, c));
            }
            coefs[static_cast<std::size_t>(r)] = coef * eval.firing.normalized(n, r);
            any = any || coefs[static_cast<std::size_t>(r)] != 0.0;
        }
        if (!any) continue;
        for (std::size_t d = 0; d < D; ++d) {
            for (Eigen::Index s = 0; s < S; ++s) {
                log_table(static_cast<Eigen::Index>(d), s) = std::log(math::gaussian_membership(
                    features(n, static_cast<Eigen::Index>(d)), model.partition.centers(static_cast<Eigen::Index>(d), s)));
            }
        }
        for (Eigen::Index r = 0; r < R; ++r) {
            const double coef = coefs[static_cast<std::size_t>(r)];
            if (coef == 0.0) continue;
            const auto idx = model.rules.row(static_cast<std::size_t>(r));
            for (std::size_t d = 0; d < D; ++d) log_mu[d] = log_table(static_cast<Eigen::Index>(d), idx[d] - 1);
            weight.prepare(log_mu, n, r);
            for (std::size_t d = 0; d < D; ++d) {
                const Eigen::Index di = static_cast<Eigen::Index>(d);
                const double m = model.partition.centers(di, idx[d] - 1);
                grad(di, idx[d] - 1) += coef * 2.0 * (features(n, di) - m) * weight(d);
            }
        }
    }
    return grad;
}

} // namespace

Eigen::MatrixXd grad_consequents(const Matrix& features, const BatchEvaluation& eval, const TskModel& model,
                                 const GateBank& gates) {
    check_gate_shapes(model, gates);
    if (eval.design.rows() != features.rows() || eval.design.cols() != features.cols() + 1) {
        throw InvalidArgument("grad_consequents: evaluation does not belong to this batch");
    }
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index D1 = eval.design.cols();
    Eigen::MatrixXd grad(R * D1, model.classes());
    for (Eigen::Index r = 0; r < R; ++r) {
        grad.middleRows(r * D1, D1).noalias() = eval.rule_gates(r) * (eval.design.transpose() * weighted_residual(eval, r));
    }
    return grad;
}

Matrix grad_centers_ada(const Matrix& features, const BatchEvaluation& eval, const TskModel& model) {
    if (eval.firing.tnorm.kind == TNormKind::product) {
        throw InvalidState("grad_centers_ada: evaluation used the product T-norm");
    }
    // d f_r / d mu_d = f_r * mu_d^(q-1) / sum_j mu_j^q, so the chain factor on
    // 2 (x - m) f_r is mu_d^q / sum_j mu_j^q.
    struct SoftminWeight {
        const IntMatrix& exponents;
        std::vector<double> w;
        void prepare(const std::vector<double>& log_mu, Eigen::Index n, Eigen::Index r) {
            const int q = exponents(n, r);
            w.resize(log_mu.size());
            double total = 0.0;
            for (std::size_t d = 0; d < log_mu.size(); ++d) {
                w[d] = std::exp(q * log_mu[d]);
                total += w[d];
            }
            for (double& v : w) v /= total;
        }
        double operator()(std::size_t d) const { return w[d]; }
    } weight{eval.firing.exponents, {}};
    return accumulate_center_gradient(features, eval, model, weight);
}

Matrix grad_centers_product(const Matrix& features, const BatchEvaluation& eval, const TskModel& model) {
    if (eval.firing.tnorm.kind != TNormKind::product) {
        throw InvalidState("grad_centers_product: evaluation did not use the product T-norm");
    }
    struct UnitWeight {
        void prepare(const std::vector<double>&, Eigen::Index, Eigen::Index) {}
        double operator()(std::size_t) const { return 1.0; }
    } weight;
    return accumulate_center_gradient(features, eval, model, weight);
}

Matrix grad_centers(const Matrix& features, const BatchEvaluation& eval, const TskModel& model) {
    return eval.firing.tnorm.kind == TNormKind::product ? grad_centers_product(features, eval, model)
                                                        : grad_centers_ada(features, eval, model);
}

Vector grad_lambda(const Matrix& features, const BatchEvaluation& eval, const TskModel& model, const GateBank& gates) {
    if (gates.mode != GateMode::feature_gated) {
        throw InvalidState("grad_lambda requires feature-gated mode");
    }
    check_gate_shapes(model, gates);
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index D = features.cols();
    Vector acc = Vector::Zero(D);
    for (Eigen::Index r = 0; r < R; ++r) {
        const Eigen::MatrixXd corr = features.transpose() * weighted_residual(eval, r); // D x C
        const auto coeffs = model.consequents.rule(static_cast<std::size_t>(r)).bottomRows(D);
        acc += corr.cwiseProduct(coeffs).rowwise().sum();
    }
    for (Eigen::Index d = 0; d < D; ++d) acc(d) *= math::gate_derivative(gates.kind, gates.lambda(d));
    return acc;
}

Vector grad_theta(const BatchEvaluation& eval, const TskModel& model, const GateBank& gates) {
    if (gates.mode != GateMode::rule_gated) {
        throw InvalidState("grad_theta requires rule-gated mode");
    }
    check_gate_shapes(model, gates);
    const Eigen::Index R = static_cast<Eigen::Index>(model.rule_count());
    const Eigen::Index C = static_cast<Eigen::Index>(model.classes());
    Vector grad(R);
    for (Eigen::Index r = 0; r < R; ++r) {
        const double inner = weighted_residual(eval, r).cwiseProduct(eval.rule_outputs.middleCols(r * C, C)).sum();
        grad(r) = math::gate_derivative(gates.kind, gates.theta(r)) * inner;
    }
    return grad;
}

GradientSet compute_gradients(const Matrix& features, const BatchEvaluation& eval, const TskModel& model,
                              const GateBank& gates, bool train_centers) {
    GradientSet g;
    g.consequents = grad_consequents(features, eval, model, gates);
    if (train_centers) g.centers = grad_centers(features, eval, model);
    if (gates.mode == GateMode::feature_gated) g.lambda = grad_lambda(features, eval, model, gates);
    if (gates.mode == GateMode::rule_gated) g.theta = grad_theta(eval, model, gates);
    return g;
}

void gd_update(std::span<double> params, std::span<const double> grads, double eta) {
    if (params.size() != grads.size()) {
        throw InvalidArgument("gd_update: parameter and gradient sizes differ (" + std::to_string(params.size()) +
                              " vs " + std::to_string(grads.size()) + ")");
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * grads[i];
}

void gd_step(TskModel& model, GateBank& gates, const GradientSet& grads, double eta) {
    auto& p = model.consequents.data();
    if (grads.consequents.rows() != p.rows() || grads.consequents.cols() != p.cols()) {
        throw InvalidArgument("gd_step: consequent gradient shape mismatch");
    }
    if (grads.centers.size() > 0 && (grads.centers.rows() != model.partition.centers.rows() ||
                                     grads.centers.cols() != model.partition.centers.cols())) {
        throw InvalidArgument("gd_step: center gradient shape mismatch");
    }
    gd_update({p.data(), static_cast<std::size_t>(p.size())},
              {grads.consequents.data(), static_cast<std::size_t>(grads.consequents.size())}, eta);
    if (grads.centers.size() > 0) {
        auto& m = model.partition.centers;
        gd_update({m.data(), static_cast<std::size_t>(m.size())},
                  {grads.centers.data(), static_cast<std::size_t>(grads.centers.size())}, eta);
    }
    if (grads.lambda.size() > 0) {
        gd_update({gates.lambda.data(), static_cast<std::size_t>(gates.lambda.size())},
                  {grads.lambda.data(), static_cast<std::size_t>(grads.lambda.size())}, eta);
    }
    if (grads.theta.size() > 0) {
        gd_update({gates.theta.data(), static_cast<std::size_t>(gates.theta.size())},
                  {grads.theta.data(), static_cast<std::size_t>(grads.theta.size())}, eta);
    }
}

ConsequentBank lse_consequents(const Matrix& features, const Matrix& targets, const Matrix& normalized_firing,
                               double ridge) {
    const Eigen::Index N = features.rows();
    const Eigen::Index D = features.cols();
    const Eigen::Index R = normalized_firing.cols();
    const Eigen::Index C = targets.cols();
    if (normalized_firing.rows() != N || targets.rows() != N) {
        throw InvalidArgument("lse_consequents: batch sizes differ");
    }
    const Eigen::Index D1 = D + 1;
    const Eigen::Index unknowns = R * D1;

    Eigen::MatrixXd design(N, unknowns);
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index r = 0; r < R; ++r) {
            const double w = normalized_firing(n, r);
            design(n, r * D1) = w;
            for (Eigen::Index d = 0; d < D; ++d) design(n, r * D1 + d + 1) = w * features(n, d);
        }
    }
    if (!design.allFinite() || !targets.allFinite()) {
        throw InvalidArgument("lse_consequents: design matrix has non-finite entries");
    }

    const Eigen::MatrixXd rhs = targets;
    Eigen::MatrixXd solution;
    if (unknowns <= N) {
        Eigen::MatrixXd normal = design.transpose() * design;
        normal.diagonal().array() += ridge;
        solution = normal.ldlt().solve(design.transpose() * rhs);
    } else {
        // Same ridge solution through the N x N dual system.
        Eigen::MatrixXd gram = design * design.transpose();
        gram.diagonal().array() += ridge;
        solution = design.transpose() * gram.ldlt().solve(rhs);
    }

    ConsequentBank bank(static_cast<std::size_t>(R), static_cast<std::size_t>(D), static_cast<std::size_t>(C));
    bank.data() = solution;
    return bank;
}

GdRun train_gd(const Matrix& features, const Matrix& targets, TskModel& model, GateBank& gates, const TNorm& tnorm,
               const GdOptions& options) {
    const Eigen::Index N = features.rows();
    if (N == 0) throw InvalidArgument("train_gd: empty training set");
    const Eigen::Index batch =
        options.batch_size == 0 || static_cast<Eigen::Index>(options.batch_size) >= N
            ? N
            : static_cast<Eigen::Index>(options.batch_size);

    std::optional<FiringTable> frozen;
    if (!options.train_centers) {
        frozen = compute_firing(features, model, tnorm);
        frozen->frozen = true;
    }

    GdRun run;
    run.losses.reserve(options.iterations + 1);
    if (options.record_gates && gates.mode != GateMode::ungated) {
        const Eigen::Index width = gates.mode == GateMode::feature_gated ? gates.lambda.size() : gates.theta.size();
        run.gate_trajectory.resize(static_cast<Eigen::Index>(options.iterations), width);
    }

    auto check_loss = [&](double loss) {
        if (!std::isfinite(loss)) {
            throw TrainingDiverged(options.phase, "non-finite loss");
        }
    };

    for (std::size_t it = 0; it < options.iterations; ++it) {
        const Eigen::Index begin = batch == N ? 0 : static_cast<Eigen::Index>((it * static_cast<std::size_t>(batch)) % static_cast<std::size_t>(N));
        const Eigen::Index count = std::min(batch, N - begin);
        GradientSet grads;
        if (count == N) {
            const auto eval = evaluate_batch(features, targets, model, gates, tnorm, frozen ? &*frozen : nullptr);
            check_loss(eval.loss);
            run.losses.push_back(eval.loss);
            grads = compute_gradients(features, eval, model, gates, options.train_centers);
        } else {
            const Matrix xb = features.middleRows(begin, count);
            const Matrix tb = targets.middleRows(begin, count);
            std::optional<FiringTable> slice;
            if (frozen) slice = frozen->rows(begin, count);
            const auto eval = evaluate_batch(xb, tb, model, gates, tnorm, slice ? &*slice : nullptr);
            check_loss(eval.loss);
            run.losses.push_back(eval.loss);
            grads = compute_gradients(xb, eval, model, gates, options.train_centers);
        }
        gd_step(model, gates, grads, options.eta);
        if (run.gate_trajectory.size() > 0) {
            run.gate_trajectory.row(static_cast<Eigen::Index>(it)) = gates.gate_values().transpose();
        }
    }
    const auto final_eval = evaluate_batch(features, targets, model, gates, tnorm, frozen ? &*frozen : nullptr);
    check_loss(final_eval.loss);
    run.losses.push_back(final_eval.loss);
    return run;
}

} // namespace adatsk
