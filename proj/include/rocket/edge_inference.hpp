#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rocket/matrix.hpp"
#include "rocket/rank_correlation.hpp"
#include "rocket/sparse_regression.hpp"

namespace rocket {

// Sparse representation of the contrast vectors
//   u_a = 1, u_b = 0, u_I = -gamma_a   and   v_a = 0, v_b = 1, v_I = -gamma_b
// so that theta_ab = u' SigmaHat v. Only nonzero coordinates are stored.
struct UVVectors {
    Index a = 0;
    Index b = 0;
    std::vector<Index> u_nodes; // original node indices, a first
    std::vector<double> u_vals;
    std::vector<Index> v_nodes; // b first
    std::vector<double> v_vals;

    static UVVectors build(Index p, Index a, Index b, const Vector& gamma_a, const Vector& gamma_b);
};

// Plug-in theta block
//   SigmaHat_{ab,ab} - G' SigmaHat_{I,ab} - SigmaHat_{I,ab}' G + G' SigmaHat_I G,
// with G = (gamma_a gamma_b). Each distinct entry is computed once, so the
// block is exactly symmetric. With population Sigma and true gammas this
// reproduces the Schur complement of true_theta_block.
ThetaBlock theta_hat(const SigmaHat& sigma, const Vector& gamma_a, const Vector& gamma_b, Index a,
                     Index b);

// Kernel value s' (u v' o C) s for one pairwise sign vector s in
// {-1,0,1}^p; evaluated support-restricted, identical to the dense sum.
double g_kernel_value(const std::vector<int>& s, const UVVectors& uv, const Matrix& cos_weights);

// Variance scale S_ab for the studentized estimator: with pairwise kernel
// values g_ii' and row means h_i = (1/(n-1)) sum_{i' != i} g_ii',
//   S_ab = pi / det(theta) * sqrt( (1/n) sum_i (h_i - mean(g))^2 ).
// CI convention: omega_hat +- z * S_ab / sqrt(n). Sums use compensated
// accumulation in a fixed order, so the result is thread-count invariant.
double s_ab_variance(const DataMatrix& x, const UVVectors& uv, const KendallMatrix& t,
                     const ThetaBlock& theta, std::size_t threads = 0);

struct Interval {
    double lo;
    double hi;
};

Interval confidence_interval(double omega_ab, double s_ab, Index n, double alpha);

struct ZTest {
    double z;
    double p_value;
};

// z = sqrt(n) * omega / s, p = 2 - 2*Phi(|z|). Throws ZeroVariance at s = 0.
ZTest z_and_pvalue(double omega_ab, double s_ab, Index n);

enum EdgeWarning : unsigned {
    kWarnNotConverged = 1u << 0,
    kWarnRidgeFallback = 1u << 1,
    kWarnZeroVariance = 1u << 2,
};

// Full inference record for one node pair.
struct EdgeInference {
    Index a = 0;
    Index b = 0;
    Index n = 0;
    double alpha = 0.0;
    ThetaBlock theta;
    double omega_ab = 0.0;
    double s_ab = 0.0;
    double z = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p_value = 0.0;
    GammaPair gamma;
    unsigned warnings = 0;

    bool numeric() const { return (warnings & kWarnZeroVariance) == 0; }
};

// Kendall matrix and its sine transform, computed once and shared across
// node pairs.
struct RankEstimate {
    KendallMatrix tau;
    SigmaHat sigma;
};

RankEstimate rank_estimate(const DataMatrix& x, std::size_t threads = 0);

// End-to-end estimator for one edge: Kendall -> sine transform -> penalized
// regressions with refit -> theta block -> point estimate, variance, CI and
// two-sided p-value. Throws SingularTheta when the theta block is too close
// to singular to invert; a zero variance estimate is returned as a flagged
// result instead.
EdgeInference rocket_edge(const DataMatrix& x, Index a, Index b, const LassoConfig& cfg,
                          double alpha, const RankEstimate* precomputed = nullptr,
                          std::size_t threads = 0);

// Same pipeline with the Lasso stage taken from per-node cached regressions.
EdgeInference rocket_edge_cached(const DataMatrix& x, const RankEstimate& rank,
                                 const NodeRegressions& cache, Index a, Index b,
                                 const LassoConfig& cfg, double alpha, std::size_t threads = 0);

} // namespace rocket
