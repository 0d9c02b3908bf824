#pragma once

#include "rocket/edge_inference.hpp"
#include "rocket/matrix.hpp"
#include "rocket/sparse_regression.hpp"

namespace rocket {

enum class BaselineKind { Pearson, Nonparanormal, PseudoScore };

// Sample Pearson correlation (column means removed; the 1/n vs 1/(n-1)
// scaling cancels in correlations). Throws ConstantColumn.
CorrelationMatrix pearson_matrix(const DataMatrix& x);

// Winsorization bound delta_n = 1 / (4 n^{1/4} sqrt(pi log n)).
double npn_delta(Index n);

// Normal-scores correlation: strict-inequality empirical CDF values
// #{x' < x}/n per column, clipped to [delta_n, 1 - delta_n], mapped through
// the normal quantile, then Pearson correlation of the scores.
CorrelationMatrix npn_matrix(const DataMatrix& x);

// Plug-in edge inference for a given correlation estimate: the same
// regression + theta-block path as the rank-based estimator, with the
// closed-form variance
//   S^2 = omega_aa * omega_bb + omega_ab^2
// (already on the sqrt(n)-free scale used by every estimator here).
EdgeInference plugin_edge(const SigmaHat& sigma_hat, Index n, Index a, Index b,
                          const LassoConfig& cfg, double alpha);
EdgeInference plugin_edge(const CorrelationMatrix& sigma_hat, Index n, Index a, Index b,
                          const LassoConfig& cfg, double alpha);

// Row-wise initial precision estimate: node j regressed on the rest by
// Lasso, refit on its own support, converted to a precision row via the
// residual variance, then symmetrized by averaging.
Matrix initial_precision_lasso_refit(const SigmaHat& sigma_hat, const LassoConfig& cfg,
                                     std::size_t threads = 0);

// One-step corrected point estimate
//   [ om_ab ((Om S)_ab + (S Om)_ab) - (Om S Om)_ab ] /
//   [ (Om S)_ab + (S Om)_ab - 1 ]
// evaluated at an initial precision estimate Om and the rank-based S.
// Throws DegenerateDenominator when the denominator is within 1e-10 of 0.
double pseudo_score_entry(const SigmaHat& sigma_hat, const Matrix& omega_hat, Index a, Index b);

// Pseudo-score edge record. No dedicated variance theory is implemented
// here; the interval reuses the plug-in variance formula evaluated at the
// initial estimate (a labeled surrogate; see README).
EdgeInference pseudo_score_edge(const SigmaHat& sigma_hat, const Matrix& omega_hat, Index n,
                                Index a, Index b, double alpha);

} // namespace rocket
