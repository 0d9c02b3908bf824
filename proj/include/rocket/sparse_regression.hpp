#pragma once

#include <optional>
#include <vector>

#include "rocket/matrix.hpp"
#include "rocket/rank_correlation.hpp"

namespace rocket {

struct LassoConfig {
    double lambda = 0.0;
    double radius = 1e6;      // l1-ball guard; effectively inactive by default
    double tol = 1e-7;        // max coordinate change per sweep
    int max_sweeps = 10000;
};

// Penalty used throughout the simulations: 2.1 * sqrt(ln(p) / n).
double default_lambda(Index n, Index p);

struct LassoResult {
    Vector gamma;
    bool converged = true;
    int sweeps = 0;
    // Objective value after each sweep; non-increasing by construction.
    std::vector<double> objective_trace;
};

// Local minimizer of 0.5 g'Ag - g'z + lambda*|g|_1 by cyclic coordinate
// descent with exact soft-threshold updates, ascending index order, zero
// (or `init`) start. A must have unit diagonal up to the documented guard;
// it may be indefinite, in which case the objective is nonconvex and the
// result is a local minimum. Throws NonUnitDiagonal / RadiusExceeded;
// hitting max_sweeps returns the last iterate with converged = false.
LassoResult lasso_local_min(const Matrix& a, const Vector& z, const LassoConfig& cfg,
                            const std::optional<Vector>& init = std::nullopt);

struct GammaPair {
    Vector gamma_a;                    // over I, refit values
    Vector gamma_b;
    std::vector<Index> joint_support;  // positions within I (ascending)
    bool refit = false;
    double lambda = 0.0;
    bool lasso_converged = true;
    bool ridge_fallback = false;
};

struct RefitResult {
    Vector gamma;          // over I, zero off the support
    bool ridge_fallback = false;
};

// Least-squares refit on a fixed support: solves SigmaHat_J x = SigmaHat_Jc
// and embeds into an I-length vector. A singular support matrix falls back
// to a ridge (1e-8 on the diagonal) and flags the result.
RefitResult refit_on_support(const SigmaHat& sigma, Index a, Index b,
                             const std::vector<Index>& support_in_i, Index c);

// Lasso for both endpoints, joint support, refit. Coefficients count as
// support members when |g_j| > 1e-10.
GammaPair gamma_pair_pipeline(const SigmaHat& sigma, Index a, Index b, const LassoConfig& cfg);

// One Lasso per node (node a regressed on all others); the solution for a
// is reusable for pair (a, b) whenever its b coefficient is zero, in which
// case dropping that coordinate is already a local minimum of the
// pair-specific problem.
class NodeRegressions {
public:
    NodeRegressions(const SigmaHat& sigma, const LassoConfig& cfg, std::size_t threads = 0);

    bool reusable(Index a, Index b) const;
    // Lasso-stage coefficients over I for pair (a, b): the cached solution
    // with the b coordinate dropped when reusable, or a fresh pair Lasso.
    Vector lasso_for_pair(const SigmaHat& sigma, Index a, Index b) const;
    const Vector& full(Index a) const { return coef_[static_cast<std::size_t>(a)]; }
    bool converged(Index a) const { return converged_[static_cast<std::size_t>(a)]; }
    std::size_t reuse_count() const;

private:
    std::vector<Vector> coef_;   // coef_[a] over [p] \ {a}, ascending
    std::vector<char> converged_;
    LassoConfig cfg_;
};

// Full pipeline for one pair given precomputed per-node regressions.
GammaPair gamma_pair_from_cache(const SigmaHat& sigma, const NodeRegressions& cache, Index a,
                                Index b, const LassoConfig& cfg);

} // namespace rocket
