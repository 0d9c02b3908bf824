#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rocket/edge_inference.hpp"
#include "rocket/rng.hpp"
#include "rocket/sparse_regression.hpp"
#include "rocket/synthetic_data.hpp"

using namespace rocket;

namespace {

Matrix random_unit_diag_spd(Index p, Rng& rng) {
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    Matrix m = a * a.transpose() / static_cast<double>(p);
    m.diagonal().array() += 0.4;
    return normalize_to_correlation(m).mat();
}

double soft(double v, double l) { return v > l ? v - l : (v < -l ? v + l : 0.0); }

} // namespace

TEST_CASE("default_lambda") {
    CHECK(default_lambda(400, 900) == doctest::Approx(0.27385).epsilon(2e-4));
    CHECK(default_lambda(400, 900) ==
          doctest::Approx(2.1 * std::sqrt(std::log(900.0) / 400.0)).epsilon(1e-15));
    // doubling n divides by sqrt(2)
    CHECK(default_lambda(800, 900) ==
          doctest::Approx(default_lambda(400, 900) / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(default_lambda(1, 10), ConfigError);
}

TEST_CASE("lasso on identity decouples into soft thresholding") {
    Rng rng(1);
    const Index p = 8;
    Vector z(p);
    for (Index i = 0; i < p; ++i) z(i) = rng.normal();
    LassoConfig cfg;
    cfg.lambda = 0.3;
    const auto res = lasso_local_min(Matrix::Identity(p, p), z, cfg);
    CHECK(res.converged);
    CHECK(res.sweeps <= 2);
    for (Index i = 0; i < p; ++i) CHECK(res.gamma(i) == doctest::Approx(soft(z(i), 0.3)).epsilon(1e-12));
}

TEST_CASE("full shrinkage at lambda >= |z|_inf") {
    Rng rng(2);
    const Matrix a = random_unit_diag_spd(6, rng);
    Vector z(6);
    for (Index i = 0; i < 6; ++i) z(i) = rng.normal() * 0.1;
    LassoConfig cfg;
    cfg.lambda = z.cwiseAbs().maxCoeff() + 0.01;
    const auto res = lasso_local_min(a, z, cfg);
    CHECK(res.gamma.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lasso KKT certificate") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const Matrix a = random_unit_diag_spd(6, rng);
        Vector z(6);
        for (Index i = 0; i < 6; ++i) z(i) = rng.normal();
        LassoConfig cfg;
        cfg.lambda = 0.1;
        const auto res = lasso_local_min(a, z, cfg);
        REQUIRE(res.converged);
        const Vector grad = a * res.gamma - z;
        for (Index j = 0; j < 6; ++j) {
            if (res.gamma(j) == 0.0) {
                CHECK(std::fabs(grad(j)) <= cfg.lambda + 1e-6);
            } else {
                CHECK(grad(j) == doctest::Approx(-cfg.lambda * (res.gamma(j) > 0 ? 1.0 : -1.0))
                                     .epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("objective is non-increasing across sweeps") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const Index p = 3 + static_cast<Index>(rng.uniform_below(8));
        Matrix a;
        if (trial % 3 == 0) {
            // indefinite with unit diagonal, as a sine-transformed rank
            // matrix can be
            a = Matrix::Identity(p, p);
            for (Index i = 0; i < p; ++i)
                for (Index j = i + 1; j < p; ++j) {
                    a(i, j) = a(j, i) = 1.6 * rng.uniform() - 0.8;
                }
        } else {
            a = random_unit_diag_spd(p, rng);
        }
        Vector z(p);
        for (Index i = 0; i < p; ++i) z(i) = rng.normal();
        LassoConfig cfg;
        cfg.lambda = 0.2;
        cfg.radius = 1e4;
        try {
            const auto res = lasso_local_min(a, z, cfg);
            for (std::size_t s = 1; s < res.objective_trace.size(); ++s) {
                CHECK(res.objective_trace[s] <=
                      res.objective_trace[s - 1] + 1e-9 * (1.0 + std::fabs(res.objective_trace[s - 1])));
            }
        } catch (const RadiusExceeded&) {
            // indefinite objectives may be unbounded below; the guard is the
            // designed behavior
        }
    }
}

TEST_CASE("lasso guards") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(1, 1) = 0.0;
    CHECK_THROWS_AS(lasso_local_min(bad, Vector::Ones(3), LassoConfig{}), NonUnitDiagonal);

    // negative-curvature direction escapes any small ball
    Matrix indef(2, 2);
    indef << 1.0, -2.0, -2.0, 1.0;
    Vector z(2);
    z << 1.0, 1.0;
    LassoConfig cfg;
    cfg.lambda = 0.01;
    cfg.radius = 10.0;
    CHECK_THROWS_AS(lasso_local_min(indef, z, cfg), RadiusExceeded);

    LassoConfig tight;
    tight.lambda = 0.0;
    tight.tol = 1e-16;
    tight.max_sweeps = 3;
    Rng rng(6);
    const Matrix a = random_unit_diag_spd(12, rng);
    Vector zz(12);
    for (Index i = 0; i < 12; ++i) zz(i) = rng.normal();
    const auto res = lasso_local_min(a, zz, tight);
    CHECK_FALSE(res.converged);
    CHECK(res.sweeps == 3);
}

TEST_CASE("refit_on_support") {
    const auto model = build_precision(GraphSpec::chain(12, 0.5));
    const SigmaHat sigma{model.sigma.mat()};

    SUBCASE("empty support returns zero") {
        const auto res = refit_on_support(sigma, 0, 5, {}, 0);
        CHECK(res.gamma.size() == 10);
        CHECK(res.gamma.cwiseAbs().maxCoeff() == 0.0);
        CHECK_FALSE(res.ridge_fallback);
    }
    SUBCASE("identity-like input gives zero coefficients") {
        const SigmaHat eye{Matrix::Identity(8, 8)};
        const auto res = refit_on_support(eye, 1, 2, {0, 3}, 1);
        CHECK(res.gamma.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("full support equals the unrestricted population solve") {
        const Index a = 3, b = 7;
        std::vector<Index> full;
        for (Index j = 0; j < 10; ++j) full.push_back(j);
        const auto res = refit_on_support(sigma, a, b, full, a);
        const auto [ga, gb] = true_gamma(model.sigma, a, b);
        CHECK((res.gamma - ga).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("gamma_pair_pipeline") {
    SUBCASE("identity input: empty joint support") {
        const SigmaHat eye{Matrix::Identity(10, 10)};
        LassoConfig cfg;
        cfg.lambda = 0.05;
        const auto pair = gamma_pair_pipeline(eye, 2, 6, cfg);
        CHECK(pair.joint_support.empty());
        CHECK(pair.gamma_a.cwiseAbs().maxCoeff() == 0.0);
        CHECK(pair.refit);
    }
    SUBCASE("population chain: support recovered, refit near truth") {
        const auto model = build_precision(GraphSpec::chain(20, 0.5));
        const SigmaHat sigma{model.sigma.mat()};
        const Index a = 8, b = 12;
        LassoConfig cfg;
        cfg.lambda = 0.05;
        const auto pair = gamma_pair_pipeline(sigma, a, b, cfg);

        const auto i_nodes = index_complement(20, a, b);
        const auto [ga, gb] = true_gamma(model.sigma, a, b);
        // true neighborhood {a-1, a+1, b-1, b+1} within I must be selected
        for (Index neighbor : {a - 1, a + 1, b - 1, b + 1}) {
            bool found = false;
            for (Index pos : pair.joint_support) {
                if (i_nodes[static_cast<std::size_t>(pos)] == neighbor) found = true;
            }
            CHECK(found);
        }
        CHECK((pair.gamma_a - ga).cwiseAbs().maxCoeff() < 0.1);
        CHECK((pair.gamma_b - gb).cwiseAbs().maxCoeff() < 0.1);
    }
}

TEST_CASE("refit does not lose accuracy when the support covers the truth") {
    const auto model = build_precision(GraphSpec::chain(15, 0.5));
    const SigmaHat sigma{model.sigma.mat()};
    const Index a = 5, b = 9;
    LassoConfig cfg;
    cfg.lambda = 0.03;
    const auto i_nodes = index_complement(15, a, b);
    const auto [ga, gb] = true_gamma(model.sigma, a, b);

    const Matrix sigma_i = [&] {
        Matrix m(13, 13);
        for (Index r = 0; r < 13; ++r)
            for (Index c = 0; c < 13; ++c)
                m(r, c) = sigma(i_nodes[static_cast<std::size_t>(r)], i_nodes[static_cast<std::size_t>(c)]);
        return m;
    }();
    Vector za(13);
    for (Index r = 0; r < 13; ++r) za(r) = sigma(i_nodes[static_cast<std::size_t>(r)], a);
    const auto lasso = lasso_local_min(sigma_i, za, cfg);
    const auto pair = gamma_pair_pipeline(sigma, a, b, cfg);

    bool covers = true;
    for (Index j = 0; j < ga.size(); ++j) {
        if (std::fabs(ga(j)) > 1e-8) {
            bool in = false;
            for (Index pos : pair.joint_support) in = in || pos == j;
            covers = covers && in;
        }
    }
    REQUIRE(covers);
    CHECK((pair.gamma_a - ga).norm() <= (lasso.gamma - ga).norm() + 1e-12);
}

TEST_CASE("all-node regressions and reuse") {
    SUBCASE("identity: everything reusable, all zero") {
        const SigmaHat eye{Matrix::Identity(8, 8)};
        LassoConfig cfg;
        cfg.lambda = 0.05;
        const NodeRegressions cache(eye, cfg);
        CHECK(cache.reuse_count() == 8 * 7);
        for (Index a = 0; a < 8; ++a) CHECK(cache.full(a).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("population chain: non-adjacent pairs reuse, cached equals fresh") {
        const auto model = build_precision(GraphSpec::chain(14, 0.5));
        const SigmaHat sigma{model.sigma.mat()};
        LassoConfig cfg;
        cfg.lambda = 0.05;
        const NodeRegressions cache(sigma, cfg);

        CHECK(cache.reusable(2, 9));
        CHECK(cache.reusable(9, 2));

        for (auto [a, b] : {std::pair<Index, Index>{2, 9}, {0, 13}, {5, 11}}) {
            REQUIRE(cache.reusable(a, b));
            const Vector cached = cache.lasso_for_pair(sigma, a, b);
            const auto i_nodes = index_complement(14, a, b);
            Matrix sigma_i(12, 12);
            Vector z(12);
            for (Index r = 0; r < 12; ++r) {
                z(r) = sigma(i_nodes[static_cast<std::size_t>(r)], a);
                for (Index c = 0; c < 12; ++c)
                    sigma_i(r, c) =
                        sigma(i_nodes[static_cast<std::size_t>(r)], i_nodes[static_cast<std::size_t>(c)]);
            }
            const auto fresh = lasso_local_min(sigma_i, z, cfg);
            CHECK((cached - fresh.gamma).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("deterministic across thread counts") {
        const auto model = build_precision(GraphSpec::grid(3, 0.2));
        const SigmaHat sigma{model.sigma.mat()};
        LassoConfig cfg;
        cfg.lambda = 0.1;
        const NodeRegressions one(sigma, cfg, 1);
        const NodeRegressions four(sigma, cfg, 4);
        for (Index a = 0; a < 9; ++a) CHECK(one.full(a) == four.full(a));
    }
}

TEST_CASE("lasso recovers gamma on sampled grid data") {
    // Monte Carlo sanity: median l2 error of the refit gammas over
    // replications stays under 0.5 at the simulation scale.
    const auto model = build_precision(GraphSpec::grid(10, 0.24));
    const Index a = model.omega0.rows() > 12 ? 11 : 1; // node (2,2)
    const Index b = 12;                                // node (2,3)
    LassoConfig cfg;
    cfg.lambda = default_lambda(400, 100);
    const auto [ga, gb] = true_gamma(model.sigma, a, b);

    std::vector<double> errors;
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = sample_elliptical(400, model.sigma, RadiusLaw::chi(),
                                         derive_seed(515, static_cast<std::uint64_t>(rep)));
        const auto rank = rank_estimate(x, 1);
        const auto pair = gamma_pair_pipeline(rank.sigma, a, b, cfg);
        errors.push_back((pair.gamma_a - ga).norm());
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[errors.size() / 2] <= 0.5);
}
