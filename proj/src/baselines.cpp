#include "rocket/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rocket/normal.hpp"
#include "rocket/parallel.hpp"

namespace rocket {

CorrelationMatrix pearson_matrix(const DataMatrix& x) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n < 2) throw TooFewSamples("pearson_matrix: need n >= 2");

    Matrix centered(n, p);
    Vector norms(p);
    for (Index j = 0; j < p; ++j) {
        const double mean = x.col(j).mean();
        centered.col(j) = x.col(j).array() - mean;
        norms(j) = centered.col(j).norm();
        if (norms(j) == 0.0) throw ConstantColumn("column " + std::to_string(j) + " is constant");
    }
    Matrix out(p, p);
    for (Index i = 0; i < p; ++i) {
        out(i, i) = 1.0;
        for (Index j = i + 1; j < p; ++j) {
            double v = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            v = std::clamp(v, -1.0, 1.0);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return CorrelationMatrix(std::move(out));
}

double npn_delta(Index n) {
    const auto dn = static_cast<double>(n);
    return 1.0 / (4.0 * std::pow(dn, 0.25) * std::sqrt(3.1415926535897932384626433832795 * std::log(dn)));
}

CorrelationMatrix npn_matrix(const DataMatrix& x) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n < 8) throw TooFewSamples("npn_matrix: need n >= 8");
    const double delta = npn_delta(n);

    DataMatrix scores(n, p);
    std::vector<double> sorted(static_cast<std::size_t>(n));
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = x(i, j);
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() == sorted.back())
            throw ConstantColumn("column " + std::to_string(j) + " is constant");
        for (Index i = 0; i < n; ++i) {
            // F(x) = #{values strictly below x} / n; always < 1, so the
            // upper Winsorization bound is active at the column maximum.
            const auto below = std::lower_bound(sorted.begin(), sorted.end(), x(i, j)) - sorted.begin();
            const double f = std::clamp(static_cast<double>(below) / static_cast<double>(n), delta,
                                        1.0 - delta);
            scores(i, j) = stats::norm_quantile(f);
        }
    }
    return pearson_matrix(scores);
}

namespace {

EdgeInference plugin_edge_impl(const SigmaHat& sigma_hat, Index n, Index a, Index b,
                               const LassoConfig& cfg, double alpha) {
    if (a == b) throw DimensionMismatch("plugin_edge requires a != b");
    EdgeInference out;
    out.a = a;
    out.b = b;
    out.n = n;
    out.alpha = alpha;
    out.gamma = gamma_pair_pipeline(sigma_hat, a, b, cfg);
    if (!out.gamma.lasso_converged) out.warnings |= kWarnNotConverged;
    if (out.gamma.ridge_fallback) out.warnings |= kWarnRidgeFallback;

    out.theta = theta_hat(sigma_hat, out.gamma.gamma_a, out.gamma.gamma_b, a, b);
    const auto entry = omega_entry_from_theta(out.theta);
    out.omega_ab = entry.omega_ab;
    const double omega_aa = out.theta.bb / entry.det;
    const double omega_bb = out.theta.aa / entry.det;
    const double variance = omega_aa * omega_bb + out.omega_ab * out.omega_ab;
    // negative only when the theta block is indefinite (degenerate sample)
    if (variance < 0.0) throw SingularTheta("plug-in variance undefined for indefinite theta block");
    out.s_ab = std::sqrt(variance);

    const auto test = z_and_pvalue(out.omega_ab, out.s_ab, n);
    out.z = test.z;
    out.p_value = test.p_value;
    const auto ci = confidence_interval(out.omega_ab, out.s_ab, n, alpha);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
    return out;
}

} // namespace

EdgeInference plugin_edge(const SigmaHat& sigma_hat, Index n, Index a, Index b,
                          const LassoConfig& cfg, double alpha) {
    return plugin_edge_impl(sigma_hat, n, a, b, cfg, alpha);
}

EdgeInference plugin_edge(const CorrelationMatrix& sigma_hat, Index n, Index a, Index b,
                          const LassoConfig& cfg, double alpha) {
    return plugin_edge_impl(SigmaHat{sigma_hat.mat()}, n, a, b, cfg, alpha);
}

Matrix initial_precision_lasso_refit(const SigmaHat& sigma_hat, const LassoConfig& cfg,
                                     std::size_t threads) {
    const Index p = sigma_hat.dim();
    Matrix rows = Matrix::Zero(p, p);
    parallel_for(static_cast<std::size_t>(p), resolve_thread_count(threads), [&](std::size_t ji) {
        const auto j = static_cast<Index>(ji);
        std::vector<Index> rest;
        rest.reserve(static_cast<std::size_t>(p - 1));
        for (Index k = 0; k < p; ++k)
            if (k != j) rest.push_back(k);

        Matrix sub(p - 1, p - 1);
        Vector rhs(p - 1);
        for (Index r = 0; r < p - 1; ++r) {
            rhs(r) = sigma_hat(rest[static_cast<std::size_t>(r)], j);
            for (Index c = 0; c < p - 1; ++c)
                sub(r, c) = sigma_hat(rest[static_cast<std::size_t>(r)], rest[static_cast<std::size_t>(c)]);
        }
        const auto lasso = lasso_local_min(sub, rhs, cfg);

        // Refit on the selected support.
        std::vector<Index> support;
        for (Index k = 0; k < lasso.gamma.size(); ++k)
            if (std::fabs(lasso.gamma(k)) > 1e-10) support.push_back(k);
        Vector beta = Vector::Zero(p - 1);
        if (!support.empty()) {
            const auto s = static_cast<Index>(support.size());
            Matrix ss(s, s);
            Vector sr(s);
            for (Index r = 0; r < s; ++r) {
                sr(r) = rhs(support[static_cast<std::size_t>(r)]);
                for (Index c = 0; c < s; ++c)
                    ss(r, c) = sub(support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(c)]);
            }
            Vector coeffs;
            try {
                coeffs = SymmetricSolver(ss).solve(sr);
            } catch (const IllConditioned&) {
                ss.diagonal().array() += 1e-8;
                coeffs = SymmetricSolver(ss).solve(sr);
            }
            for (Index r = 0; r < s; ++r) beta(support[static_cast<std::size_t>(r)]) = coeffs(r);
        }

        // Residual variance of the regression: tau^2 = 1 - beta' Sigma_{.,j};
        // precision row is then (1, -beta) / tau^2 in the right slots.
        double tau2 = sigma_hat(j, j);
        for (Index r = 0; r < p - 1; ++r) tau2 -= beta(r) * rhs(r);
        if (std::fabs(tau2) < 1e-12) tau2 = (tau2 < 0.0 ? -1e-12 : 1e-12);
        rows(j, j) = 1.0 / tau2;
        for (Index r = 0; r < p - 1; ++r)
            rows(j, rest[static_cast<std::size_t>(r)]) = -beta(r) / tau2;
    });
    return 0.5 * (rows + rows.transpose());
}

double pseudo_score_entry(const SigmaHat& sigma_hat, const Matrix& omega_hat, Index a, Index b) {
    const Index p = sigma_hat.dim();
    if (omega_hat.rows() != p || omega_hat.cols() != p)
        throw DimensionMismatch("pseudo_score_entry: dimension mismatch");
    const double os_ab = omega_hat.row(a).dot(sigma_hat.m.col(b));
    const double so_ab = sigma_hat.m.row(a).dot(omega_hat.col(b));
    const double oso_ab = omega_hat.row(a).dot(Vector(sigma_hat.m * omega_hat.col(b)));
    const double denom = os_ab + so_ab - 1.0;
    if (std::fabs(denom) < 1e-10) throw DegenerateDenominator("pseudo score denominator near zero");
    return (omega_hat(a, b) * (os_ab + so_ab) - oso_ab) / denom;
}

EdgeInference pseudo_score_edge(const SigmaHat& sigma_hat, const Matrix& omega_hat, Index n,
                                Index a, Index b, double alpha) {
    EdgeInference out;
    out.a = a;
    out.b = b;
    out.n = n;
    out.alpha = alpha;
    out.omega_ab = pseudo_score_entry(sigma_hat, omega_hat, a, b);
    // Surrogate variance: plug-in formula at the initial estimate.
    const double variance =
        omega_hat(a, a) * omega_hat(b, b) + omega_hat(a, b) * omega_hat(a, b);
    if (variance < 0.0)
        throw SingularTheta("surrogate variance undefined for this initial estimate");
    out.s_ab = std::sqrt(variance);

    const auto test = z_and_pvalue(out.omega_ab, out.s_ab, n);
    out.z = test.z;
    out.p_value = test.p_value;
    const auto ci = confidence_interval(out.omega_ab, out.s_ab, n, alpha);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
    return out;
}

} // namespace rocket
