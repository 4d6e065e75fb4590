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
#include "adatsk/training.hpp"

#include "doctest.h"
#include "oracle.hpp"

#include <cmath>
#include <string>
#include <random>
#include <vector>

using namespace adatsk;

TEST_CASE("gradient families match finite differences of the reference loss") {
    const std::array<oracle::Family, 5> families{oracle::Family::consequents, oracle::Family::centers_ada,
                                                 oracle::Family::centers_product, oracle::Family::lambda,
                                                 oracle::Family::theta};
    std::uint64_t seed = 100;
    for (auto family : families) {
        const std::string family_name = oracle::name(family);
        CAPTURE(family_name);
        const auto result = oracle::gradient_suite(family, 60, seed++);
        CHECK(result.instances == 60);
        CHECK(result.worst <= oracle::tolerance(family));
    }
}

TEST_CASE("gradients with legacy gates match finite differences") {
    std::mt19937_64 rng(77);
    for (auto kind : {math::GateKind::sigmoid, math::GateKind::one_minus_exp, math::GateKind::exp_sq}) {
        for (int i = 0; i < 10; ++i) {
            auto p = oracle::random_problem(rng, 4, 3, 2, 4, 2, TNorm{}, GateMode::feature_gated, kind);
            const auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
            const Vector analytic = grad_lambda(p.X, eval, p.model, p.gates);
            const Vector fd = oracle::finite_difference(
                p, [](oracle::Problem& q, Eigen::Index k) -> double& { return q.gates.lambda(k); }, analytic.size());
            CHECK(oracle::relative_error(analytic, fd) <= 1e-5);
        }
    }
}

TEST_CASE("gradient edge cases") {
    std::mt19937_64 rng(31);
    SUBCASE("zero residual gives zero gradients") {
        auto p = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::feature_gated);
        auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        const Matrix outputs = eval.outputs;
        eval = evaluate_batch(p.X, outputs, p.model, p.gates, p.tnorm);
        CHECK(eval.loss == 0.0);
        CHECK(grad_consequents(p.X, eval, p.model, p.gates).isZero());
        CHECK(grad_centers(p.X, eval, p.model).isZero());
        CHECK(grad_lambda(p.X, eval, p.model, p.gates).isZero());
    }
    SUBCASE("closed feature gate zeroes that gradient column") {
        auto p = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::feature_gated);
        p.gates.lambda(2) = 0.0;
        const auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        const auto g = grad_consequents(p.X, eval, p.model, p.gates);
        for (Eigen::Index r = 0; r < 4; ++r) CHECK(g.row(r * 4 + 3).isZero());
    }
    SUBCASE("zero consequents give zero gate gradients") {
        auto p = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::feature_gated);
        p.model.consequents.data().setZero();
        auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        CHECK(grad_lambda(p.X, eval, p.model, p.gates).isZero());
        auto q = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::rule_gated);
        q.model.consequents.data().setZero();
        eval = evaluate_batch(q.X, q.T, q.model, q.gates, q.tnorm);
        CHECK(grad_theta(eval, q.model, q.gates).isZero());
    }
    SUBCASE("gates at the extrema have zero gradient") {
        auto p = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::feature_gated);
        p.gates.lambda(1) = 1.0;
        auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        CHECK(grad_lambda(p.X, eval, p.model, p.gates)(1) == 0.0);
        auto q = oracle::random_problem(rng, 4, 3, 3, 4, 2, TNorm{}, GateMode::rule_gated);
        q.gates.theta(0) = 1.0;
        q.gates.theta(3) = -1.0;
        eval = evaluate_batch(q.X, q.T, q.model, q.gates, q.tnorm);
        const Vector g = grad_theta(eval, q.model, q.gates);
        CHECK(g(0) == 0.0);
        CHECK(g(3) == 0.0);
    }
    SUBCASE("sample at a center contributes nothing to that center") {
        auto p = oracle::random_problem(rng, 1, 2, 2, 1, 2, TNorm{}, GateMode::ungated);
        p.model.rules = IndexMatrix(1, 2, {1, 2}, RuleBaseKind::fuco);
        p.X(0, 0) = p.model.partition.centers(0, 0);
        p.X(0, 1) = p.model.partition.centers(1, 1);
        auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        const Matrix g = grad_centers(p.X, eval, p.model);
        CHECK(g(0, 0) == 0.0);
        CHECK(g(1, 1) == 0.0);
        p.tnorm = TNorm{TNormKind::product};
        eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        CHECK(grad_centers(p.X, eval, p.model).isZero());
    }
    SUBCASE("wrong modes are rejected") {
        auto p = oracle::random_problem(rng, 3, 2, 2, 3, 2, TNorm{}, GateMode::ungated);
        const auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        CHECK_THROWS_AS(grad_lambda(p.X, eval, p.model, p.gates), InvalidState);
        CHECK_THROWS_AS(grad_theta(eval, p.model, p.gates), InvalidState);
        CHECK_THROWS_AS(grad_centers_product(p.X, eval, p.model), InvalidState);
        auto frozen = compute_firing(p.X, p.model, p.tnorm);
        frozen.frozen = true;
        const auto eval_frozen = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm, &frozen);
        CHECK_THROWS_AS(grad_centers(p.X, eval_frozen, p.model), InvalidState);
    }
}

TEST_CASE("gradients are bit-reproducible") {
    std::mt19937_64 rng(41);
    const auto p = oracle::random_problem(rng, 5, 4, 3, 6, 3, TNorm{}, GateMode::feature_gated);
    const auto a = compute_gradients(p.X, evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm), p.model, p.gates, true);
    const auto b = compute_gradients(p.X, evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm), p.model, p.gates, true);
    CHECK(a.centers == b.centers);
    CHECK(a.consequents == b.consequents);
    CHECK(a.lambda == b.lambda);
}

TEST_CASE("gd update arithmetic") {
    std::vector<double> w{1.0};
    const std::vector<double> g{0.5};
    gd_update(w, g, 0.1);
    CHECK(w[0] == doctest::Approx(0.95).epsilon(1e-15));
    gd_update(w, g, 0.1);
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-15));
    const std::vector<double> zero{0.0};
    gd_update(w, zero, 0.1);
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-15));
    const std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS_AS(gd_update(w, wrong, 0.1), InvalidArgument);
}

TEST_CASE("a small step does not increase the loss") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const auto mode = std::array{GateMode::ungated, GateMode::feature_gated, GateMode::rule_gated}[trial % 3];
        auto p = oracle::random_problem(rng, 5, 3, 3, 5, 2, TNorm{}, mode);
        const auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        const auto grads = compute_gradients(p.X, eval, p.model, p.gates, true);
        gd_step(p.model, p.gates, grads, 1e-4);
        const auto after = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm);
        CHECK(after.loss <= eval.loss);
    }
}

TEST_CASE("least squares consequents") {
    std::mt19937_64 rng(47);
    SUBCASE("recovers exactly representable targets") {
        // Well-separated product-firing rules keep the design well conditioned.
        auto p = oracle::random_problem(rng, 80, 2, 3, 3, 2, TNorm{TNormKind::product}, GateMode::ungated);
        p.X *= 4.0;
        p.model.partition.centers.row(0) << 0.0, 2.0, 4.0;
        p.model.partition.centers.row(1) << 0.0, 2.0, 4.0;
        p.model.rules = build_coco(3, 2);
        const auto firing = compute_firing(p.X, p.model, p.tnorm);
        const auto eval = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm, &firing);
        const Matrix targets = eval.outputs;
        const auto bank = lse_consequents(p.X, targets, firing.normalized);
        CHECK((bank.data() - p.model.consequents.data()).cwiseAbs().maxCoeff() <= 1e-6);
    }
    SUBCASE("zero targets give zero consequents") {
        auto p = oracle::random_problem(rng, 10, 3, 2, 4, 3, TNorm{}, GateMode::ungated);
        const auto firing = compute_firing(p.X, p.model, p.tnorm);
        const auto bank = lse_consequents(p.X, Matrix::Zero(10, 3), firing.normalized);
        CHECK(bank.data().isZero());
    }
    SUBCASE("more unknowns than samples") {
        auto p = oracle::random_problem(rng, 6, 4, 3, 5, 2, TNorm{}, GateMode::ungated);
        const auto firing = compute_firing(p.X, p.model, p.tnorm);
        p.model.consequents = lse_consequents(p.X, p.T, firing.normalized);
        const double lse_loss = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm, &firing).loss;
        p.model.consequents.data().setZero();
        const double zero_loss = evaluate_batch(p.X, p.T, p.model, p.gates, p.tnorm, &firing).loss;
        CHECK(lse_loss <= zero_loss);
        CHECK(lse_loss <= 1e-6);
    }
    SUBCASE("non-finite design is rejected") {
        auto p = oracle::random_problem(rng, 4, 2, 2, 2, 2, TNorm{}, GateMode::ungated);
        Matrix firing = Matrix::Constant(4, 2, 0.5);
        firing(1, 1) = NAN;
        CHECK_THROWS_AS(lse_consequents(p.X, p.T, firing), InvalidArgument);
    }
}

TEST_CASE("least squares is never worse than gradient descent") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = oracle::random_problem(rng, 30, 3, 3, 4, 3, TNorm{}, GateMode::ungated);
        p.model.consequents.data().setZero();
        TskModel gd_model = p.model;
        GateBank gates = GateBank::ungated();
        GdOptions opts;
        opts.eta = 0.5;
        opts.iterations = 300;
        opts.train_centers = false;
        const auto run = train_gd(p.X, p.T, gd_model, gates, p.tnorm, opts);
        const auto firing = compute_firing(p.X, p.model, p.tnorm);
        p.model.consequents = lse_consequents(p.X, p.T, firing.normalized);
        const double lse_loss = evaluate_batch(p.X, p.T, p.model, gates, p.tnorm, &firing).loss;
        CHECK(lse_loss <= run.losses.back() + 1e-6);
    }
}

TEST_CASE("gradient descent loop") {
    std::mt19937_64 rng(59);
    auto p = oracle::random_problem(rng, 20, 3, 3, 3, 2, TNorm{}, GateMode::feature_gated);
    p.model.consequents.data().setZero();
    p.gates.lambda.setConstant(0.01);
    GdOptions opts;
    opts.eta = 0.05;
    opts.iterations = 50;
    opts.record_gates = true;
    const auto run = train_gd(p.X, p.T, p.model, p.gates, p.tnorm, opts);
    CHECK(run.losses.size() == 51);
    CHECK(run.losses.back() <= run.losses.front());
    CHECK(run.gate_trajectory.rows() == 50);
    CHECK(run.gate_trajectory.cols() == 3);
    CHECK(run.gate_trajectory.row(49).transpose() == p.gates.gate_values());

    SUBCASE("mini-batches cycle through the data") {
        auto q = oracle::random_problem(rng, 20, 3, 3, 3, 2, TNorm{}, GateMode::ungated);
        GdOptions mb = opts;
        mb.batch_size = 7;
        mb.record_gates = false;
        const auto r = train_gd(q.X, q.T, q.model, q.gates, q.tnorm, mb);
        CHECK(r.losses.size() == 51);
        for (double l : r.losses) CHECK(std::isfinite(l));
    }
    SUBCASE("divergence is reported with the phase name") {
        auto q = oracle::random_problem(rng, 20, 3, 3, 3, 2, TNorm{}, GateMode::ungated);
        GdOptions wild = opts;
        wild.eta = 1e200;
        wild.phase = "probe";
        try {
            train_gd(q.X, q.T, q.model, q.gates, q.tnorm, wild);
            FAIL("expected divergence");
        } catch (const TrainingDiverged& e) {
            CHECK(e.phase() == "probe");
        }
    }
    SUBCASE("frozen centers stay put") {
        auto q = oracle::random_problem(rng, 20, 3, 3, 3, 2, TNorm{}, GateMode::ungated);
        const Matrix centers = q.model.partition.centers;
        GdOptions frozen = opts;
        frozen.train_centers = false;
        train_gd(q.X, q.T, q.model, q.gates, q.tnorm, frozen);
        CHECK(q.model.partition.centers == centers);
    }
}

TEST_CASE("train config defaults") {
    TrainConfig c;
    CHECK(c.eta == 0.01);
    CHECK(c.iterations_fs(13) == 1000);
    CHECK(c.iterations_re(2000) == 200);
    CHECK(c.zeta_lambda_for(13) == 0.5);
    CHECK(c.zeta_theta_for(13) == 0.3);
    CHECK(c.zeta_lambda_for(7129) == 0.4);
    CHECK(c.zeta_theta_for(7129) == 0.5);
    CHECK(c.centers_frozen(1001));
    CHECK_FALSE(c.centers_frozen(1000));
    c.eta = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.eta = 0.1;
    c.zeta_lambda = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}
