#include <cmath>

#include "doctest.h"
#include "rocket/matrix.hpp"
#include "rocket/rng.hpp"

using namespace rocket;

namespace {

Matrix random_spd(Index p, Rng& rng, double ridge = 0.5) {
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    Matrix m = a * a.transpose() / static_cast<double>(p);
    m.diagonal().array() += ridge;
    return 0.5 * (m + m.transpose());
}

CorrelationMatrix random_correlation(Index p, Rng& rng, double ridge = 0.5) {
    return normalize_to_correlation(random_spd(p, rng, ridge));
}

} // namespace

TEST_CASE("normalize_to_correlation basics") {
    CHECK(normalize_to_correlation(Matrix::Identity(3, 3)).mat() == Matrix::Identity(3, 3));

    Matrix m(2, 2);
    m << 4, 2, 2, 4;
    const auto corr = normalize_to_correlation(m);
    CHECK(corr(0, 0) == 1.0);
    CHECK(corr(0, 1) == doctest::Approx(0.5).epsilon(1e-15));

    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = 0.0;
    CHECK_THROWS_AS(normalize_to_correlation(bad), NonPositiveDiagonal);
}

TEST_CASE("normalize_to_correlation is idempotent") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto corr = random_correlation(6, rng);
        const auto again = normalize_to_correlation(corr.mat());
        CHECK((again.mat() - corr.mat()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("solve_sym") {
    Vector b(3);
    b << 1, 2, 3;
    CHECK(solve_sym(Matrix::Identity(3, 3), b) == b);

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 2;
    diag(1, 1) = 4;
    Vector rhs(2);
    rhs << 2, 4;
    const Vector x = solve_sym(diag, rhs);
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(1.0));

    // construct x*, multiply, recover
    Rng rng(42);
    const Matrix a = random_spd(5, rng);
    Vector xstar(5);
    for (Index i = 0; i < 5; ++i) xstar(i) = rng.normal();
    const Vector sol = solve_sym(a, a * xstar);
    CHECK((sol - xstar).cwiseAbs().maxCoeff() < 1e-8);

    Matrix singular = Matrix::Ones(3, 3);
    CHECK_THROWS_AS(solve_sym(singular, Vector::Ones(3)), IllConditioned);
    CHECK_THROWS_AS(solve_sym(Matrix::Identity(3, 3), Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("true_gamma") {
    Rng rng(7);
    SUBCASE("identity gives zero coefficients") {
        const CorrelationMatrix eye(Matrix::Identity(5, 5));
        const auto [ga, gb] = true_gamma(eye, 0, 3);
        CHECK(ga.cwiseAbs().maxCoeff() == 0.0);
        CHECK(gb.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("p=3 scalar case") {
        const double rho = 0.4;
        Matrix m = Matrix::Identity(3, 3);
        m(0, 2) = m(2, 0) = rho;
        m(1, 2) = m(2, 1) = rho;
        const auto [ga, gb] = true_gamma(CorrelationMatrix(m), 0, 1);
        REQUIRE(ga.size() == 1);
        CHECK(ga(0) == doctest::Approx(rho).epsilon(1e-14));
        CHECK(gb(0) == doctest::Approx(rho).epsilon(1e-14));
    }
    SUBCASE("matches the dense-inverse identity gamma_c = -Omega_{I,ab} Theta_{ab,c}") {
        for (int trial = 0; trial < 10; ++trial) {
            const Index p = 8;
            const auto sigma = random_correlation(p, rng);
            const Index a = 1, b = 5;
            const auto [ga, gb] = true_gamma(sigma, a, b);

            const Matrix omega = sigma.mat().inverse();
            Matrix omega_ab(2, 2);
            omega_ab << omega(a, a), omega(a, b), omega(b, a), omega(b, b);
            const Matrix theta = omega_ab.inverse();
            const auto idx = index_complement(p, a, b);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const double expect_a = -(omega(idx[j], a) * theta(0, 0) + omega(idx[j], b) * theta(1, 0));
                const double expect_b = -(omega(idx[j], a) * theta(0, 1) + omega(idx[j], b) * theta(1, 1));
                CHECK(ga(static_cast<Index>(j)) == doctest::Approx(expect_a).epsilon(1e-8));
                CHECK(gb(static_cast<Index>(j)) == doctest::Approx(expect_b).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("true_theta_block") {
    SUBCASE("identity") {
        const auto theta = true_theta_block(CorrelationMatrix(Matrix::Identity(4, 4)), 1, 2);
        CHECK(theta.aa == doctest::Approx(1.0));
        CHECK(theta.bb == doctest::Approx(1.0));
        CHECK(theta.ab == doctest::Approx(0.0));
    }
    SUBCASE("p=2 empty Schur complement") {
        Matrix m = Matrix::Identity(2, 2);
        m(0, 1) = m(1, 0) = 0.5;
        const auto theta = true_theta_block(CorrelationMatrix(m), 0, 1);
        CHECK(theta.aa == 1.0);
        CHECK(theta.ab == 0.5);
        CHECK(theta.bb == 1.0);
    }
    SUBCASE("inverse equals the {a,b} block of the dense inverse") {
        Rng rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            const Index p = 10;
            const auto sigma = random_correlation(p, rng);
            const Index a = 2, b = 7;
            const auto theta = true_theta_block(sigma, a, b);
            const Matrix omega = sigma.mat().inverse();
            Matrix theta_m(2, 2);
            theta_m << theta.aa, theta.ab, theta.ab, theta.bb;
            const Matrix inv = theta_m.inverse();
            CHECK(inv(0, 0) == doctest::Approx(omega(a, a)).epsilon(1e-8));
            CHECK(inv(0, 1) == doctest::Approx(omega(a, b)).epsilon(1e-8));
            CHECK(inv(1, 1) == doctest::Approx(omega(b, b)).epsilon(1e-8));
        }
    }
    SUBCASE("four-term expansion agrees with the Schur complement") {
        Rng rng(19);
        for (int trial = 0; trial < 20; ++trial) {
            const Index p = 12;
            const auto sigma = random_correlation(p, rng);
            const Index a = 0, b = 4;
            const auto theta = true_theta_block(sigma, a, b);
            const auto [ga, gb] = true_gamma(sigma, a, b);
            const auto idx = index_complement(p, a, b);
            const auto k = static_cast<Index>(idx.size());
            Matrix g(k, 2), s_iab(k, 2), s_i(k, k);
            for (Index r = 0; r < k; ++r) {
                g(r, 0) = ga(r);
                g(r, 1) = gb(r);
                s_iab(r, 0) = sigma(idx[static_cast<std::size_t>(r)], a);
                s_iab(r, 1) = sigma(idx[static_cast<std::size_t>(r)], b);
                for (Index c = 0; c < k; ++c)
                    s_i(r, c) = sigma(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
            }
            Matrix s_abab(2, 2);
            s_abab << sigma(a, a), sigma(a, b), sigma(b, a), sigma(b, b);
            const Matrix four = s_abab - g.transpose() * s_iab - s_iab.transpose() * g +
                                g.transpose() * s_i * g;
            CHECK(four(0, 0) == doctest::Approx(theta.aa).epsilon(1e-8));
            CHECK(four(0, 1) == doctest::Approx(theta.ab).epsilon(1e-8));
            CHECK(four(1, 1) == doctest::Approx(theta.bb).epsilon(1e-8));
        }
    }
}

TEST_CASE("omega_entry_from_theta") {
    ThetaBlock eye{0, 1, 1.0, 0.0, 1.0};
    auto entry = omega_entry_from_theta(eye);
    CHECK(entry.omega_ab == 0.0);
    CHECK(entry.det == 1.0);

    ThetaBlock t{0, 1, 2.0, 1.0, 2.0};
    entry = omega_entry_from_theta(t);
    CHECK(entry.det == doctest::Approx(3.0));
    CHECK(entry.omega_ab == doctest::Approx(-1.0 / 3.0));

    ThetaBlock singular{0, 1, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(omega_entry_from_theta(singular), SingularTheta);

    // against the dense inverse
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sigma = random_correlation(9, rng);
        const auto theta = true_theta_block(sigma, 1, 6);
        const auto e = omega_entry_from_theta(theta);
        const Matrix omega = sigma.mat().inverse();
        CHECK(e.omega_ab == doctest::Approx(omega(1, 6)).epsilon(1e-8));
    }
}

TEST_CASE("sparse spectral norm, exhaustive oracle") {
    CHECK(sparse_spectral_norm_exhaustive(Matrix::Identity(4, 4), 2) == doctest::Approx(1.0));

    Matrix d = Matrix::Identity(4, 4);
    d(0, 0) = 3.0;
    CHECK(sparse_spectral_norm_exhaustive(d, 1) == doctest::Approx(3.0));

    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix m(6, 6);
        for (Index i = 0; i < 6; ++i)
            for (Index j = 0; j < 6; ++j) m(i, j) = rng.normal();
        Eigen::JacobiSVD<Matrix> svd(m);
        CHECK(sparse_spectral_norm_exhaustive(m, 6) ==
              doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
    }

    CHECK_THROWS_AS(sparse_spectral_norm_exhaustive(Matrix::Identity(17, 17), 2),
                    DimensionTooLarge);
}

TEST_CASE("k-sparse norm bounds general quadratic forms") {
    // |u' M v| <= (|u|_2 + |u|_1 / sqrt(k)) (|v|_2 + |v|_1 / sqrt(k)) |M|_{S_k}
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Index p = 3 + static_cast<Index>(rng.uniform_below(6)); // 3..8
        const int k = 1 + static_cast<int>(rng.uniform_below(3));
        Matrix m(p, p);
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
        Vector u(p), v(p);
        for (Index i = 0; i < p; ++i) {
            u(i) = rng.uniform() < 0.3 ? 0.0 : rng.normal();
            v(i) = rng.uniform() < 0.3 ? 0.0 : rng.normal();
        }
        const double norm = sparse_spectral_norm_exhaustive(m, k);
        const double lhs = std::fabs(u.dot(m * v));
        const double rhs = (u.norm() + u.lpNorm<1>() / std::sqrt(static_cast<double>(k))) *
                           (v.norm() + v.lpNorm<1>() / std::sqrt(static_cast<double>(k))) * norm;
        CHECK(lhs <= rhs + 1e-10);
    }
}
