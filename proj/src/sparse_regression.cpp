#include "rocket/sparse_regression.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "rocket/parallel.hpp"

namespace rocket {

namespace {

constexpr double kSupportEps = 1e-10;

inline double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

Matrix gather_square(const Matrix& m, const std::vector<Index>& idx) {
    const auto k = static_cast<Index>(idx.size());
    Matrix out(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return out;
}

Vector gather_column(const Matrix& m, const std::vector<Index>& idx, Index c) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = m(idx[i], c);
    return out;
}

} // namespace

double default_lambda(Index n, Index p) {
    if (n < 2 || p < 2) throw ConfigError("default_lambda needs n >= 2 and p >= 2");
    return 2.1 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

LassoResult lasso_local_min(const Matrix& a, const Vector& z, const LassoConfig& cfg,
                            const std::optional<Vector>& init) {
    const Index d = z.size();
    if (a.rows() != d || a.cols() != d) throw DimensionMismatch("lasso: A and z dimensions differ");
    for (Index j = 0; j < d; ++j) {
        if (a(j, j) <= 1e-8) throw NonUnitDiagonal("lasso: diagonal entry <= 1e-8");
    }

    LassoResult res;
    res.gamma = init.value_or(Vector::Zero(d));
    if (init && init->size() != d) throw DimensionMismatch("lasso: init has wrong length");
    if (d == 0) return res;

    Vector w = a * res.gamma; // running A * gamma

    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < d; ++j) {
            const double old = res.gamma(j);
            const double partial = z(j) - (w(j) - a(j, j) * old);
            const double updated = soft_threshold(partial, cfg.lambda) / a(j, j);
            if (updated != old) {
                res.gamma(j) = updated;
                w += (updated - old) * a.col(j);
                max_change = std::max(max_change, std::fabs(updated - old));
            }
        }
        res.sweeps = sweep + 1;

        const double l1 = res.gamma.lpNorm<1>();
        if (l1 > cfg.radius) throw RadiusExceeded("lasso iterate left the l1 ball");

        const double obj = 0.5 * res.gamma.dot(w) - res.gamma.dot(z) + cfg.lambda * l1;
        if (!res.objective_trace.empty()) {
            // exact per-coordinate minimization cannot increase the objective
            assert(obj <= res.objective_trace.back() +
                              1e-9 * (1.0 + std::fabs(res.objective_trace.back())));
        }
        res.objective_trace.push_back(obj);

        if (max_change < cfg.tol) return res;
    }
    res.converged = false;
    return res;
}

RefitResult refit_on_support(const SigmaHat& sigma, Index a, Index b,
                             const std::vector<Index>& support_in_i, Index c) {
    const auto i_nodes = index_complement(sigma.dim(), a, b);
    RefitResult res;
    res.gamma = Vector::Zero(static_cast<Index>(i_nodes.size()));
    if (support_in_i.empty()) return res;

    std::vector<Index> nodes;
    nodes.reserve(support_in_i.size());
    for (Index pos : support_in_i) nodes.push_back(i_nodes[static_cast<std::size_t>(pos)]);

    Matrix sub = gather_square(sigma.m, nodes);
    const Vector rhs = gather_column(sigma.m, nodes, c);
    Vector x;
    try {
        x = SymmetricSolver(sub).solve(rhs);
    } catch (const IllConditioned&) {
        sub.diagonal().array() += 1e-8;
        x = SymmetricSolver(sub).solve(rhs);
        res.ridge_fallback = true;
    }
    for (std::size_t k = 0; k < support_in_i.size(); ++k)
        res.gamma(support_in_i[k]) = x(static_cast<Index>(k));
    return res;
}

namespace {

std::vector<Index> union_support(const Vector& ga, const Vector& gb) {
    std::vector<Index> support;
    for (Index j = 0; j < ga.size(); ++j) {
        if (std::fabs(ga(j)) > kSupportEps || std::fabs(gb(j)) > kSupportEps) support.push_back(j);
    }
    return support;
}

GammaPair assemble_pair(const SigmaHat& sigma, Index a, Index b, const LassoConfig& cfg,
                        const Vector& lasso_a, const Vector& lasso_b, bool converged) {
    GammaPair pair;
    pair.lambda = cfg.lambda;
    pair.lasso_converged = converged;
    pair.joint_support = union_support(lasso_a, lasso_b);
    auto ra = refit_on_support(sigma, a, b, pair.joint_support, a);
    auto rb = refit_on_support(sigma, a, b, pair.joint_support, b);
    pair.gamma_a = std::move(ra.gamma);
    pair.gamma_b = std::move(rb.gamma);
    pair.ridge_fallback = ra.ridge_fallback || rb.ridge_fallback;
    pair.refit = true;
    return pair;
}

} // namespace

GammaPair gamma_pair_pipeline(const SigmaHat& sigma, Index a, Index b, const LassoConfig& cfg) {
    if (a == b) throw DimensionMismatch("gamma_pair_pipeline requires a != b");
    const auto i_nodes = index_complement(sigma.dim(), a, b);
    const Matrix sigma_i = gather_square(sigma.m, i_nodes);
    const auto fit_a = lasso_local_min(sigma_i, gather_column(sigma.m, i_nodes, a), cfg);
    const auto fit_b = lasso_local_min(sigma_i, gather_column(sigma.m, i_nodes, b), cfg);
    return assemble_pair(sigma, a, b, cfg, fit_a.gamma, fit_b.gamma,
                         fit_a.converged && fit_b.converged);
}

NodeRegressions::NodeRegressions(const SigmaHat& sigma, const LassoConfig& cfg, std::size_t threads)
    : cfg_(cfg) {
    const Index p = sigma.dim();
    if (p < 3) throw DimensionMismatch("all-node regressions need p >= 3");
    coef_.resize(static_cast<std::size_t>(p));
    converged_.assign(static_cast<std::size_t>(p), 1);
    parallel_for(static_cast<std::size_t>(p), resolve_thread_count(threads), [&](std::size_t ai) {
        const auto a = static_cast<Index>(ai);
        std::vector<Index> rest;
        rest.reserve(static_cast<std::size_t>(p - 1));
        for (Index j = 0; j < p; ++j)
            if (j != a) rest.push_back(j);
        const auto fit =
            lasso_local_min(gather_square(sigma.m, rest), gather_column(sigma.m, rest, a), cfg_);
        coef_[ai] = fit.gamma;
        converged_[ai] = fit.converged ? 1 : 0;
    });
}

bool NodeRegressions::reusable(Index a, Index b) const {
    const Index pos = (b < a) ? b : b - 1; // position of node b within [p] \ {a}
    return std::fabs(coef_[static_cast<std::size_t>(a)](pos)) <= kSupportEps;
}

Vector NodeRegressions::lasso_for_pair(const SigmaHat& sigma, Index a, Index b) const {
    const auto& full = coef_[static_cast<std::size_t>(a)];
    if (reusable(a, b)) {
        const Index pos = (b < a) ? b : b - 1;
        Vector out(full.size() - 1);
        Index k = 0;
        for (Index j = 0; j < full.size(); ++j)
            if (j != pos) out(k++) = full(j);
        return out;
    }
    const auto i_nodes = index_complement(sigma.dim(), a, b);
    return lasso_local_min(gather_square(sigma.m, i_nodes), gather_column(sigma.m, i_nodes, a), cfg_)
        .gamma;
}

std::size_t NodeRegressions::reuse_count() const {
    std::size_t count = 0;
    const auto p = static_cast<Index>(coef_.size());
    for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b)
            if (a != b && reusable(a, b)) ++count;
    return count;
}

GammaPair gamma_pair_from_cache(const SigmaHat& sigma, const NodeRegressions& cache, Index a,
                                Index b, const LassoConfig& cfg) {
    const Vector lasso_a = cache.lasso_for_pair(sigma, a, b);
    const Vector lasso_b = cache.lasso_for_pair(sigma, b, a);
    // lasso_b is over [p] \ {b,a} which equals I as a set; both use
    // ascending node order, so the coordinates already line up.
    return assemble_pair(sigma, a, b, cfg, lasso_a, lasso_b,
                         cache.converged(a) && cache.converged(b));
}

} // namespace rocket
