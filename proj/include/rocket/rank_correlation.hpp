#pragma once

#include <span>

#include "rocket/matrix.hpp"

namespace rocket {

// Matrix of pairwise Kendall rank correlations, with the sample size that
// produced it. Off-diagonal entries of a tie-free sample lie on the grid
// {-1, -1 + 2/C(n,2), ..., 1}.
struct KendallMatrix {
    Matrix tau;
    Index n = 0;

    Index dim() const { return tau.rows(); }
};

// Entrywise sin(pi/2 * tau): the rank-based correlation estimate. Not
// necessarily positive semidefinite.
struct SigmaHat {
    Matrix m;

    Index dim() const { return m.rows(); }
    double operator()(Index i, Index j) const { return m(i, j); }
};

// Kendall's tau between two samples:
//   (1 / C(n,2)) * sum_{i<i'} sign(x_i - x_i') * sign(y_i - y_i')
// with sign(0) = 0 so tied pairs contribute zero and the denominator is
// untouched. Tie-free input goes through an O(n log n) inversion count;
// any tie in either vector falls back to the direct O(n^2) sum. The two
// paths produce bit-identical results on tie-free input (both reduce to
// the same integer numerator).
double kendall_tau_pair(std::span<const double> x, std::span<const double> y);

// Direct O(n^2) evaluation; the correctness oracle for the fast path and
// the path taken when ties are present.
double kendall_tau_pair_naive(std::span<const double> x, std::span<const double> y);

// All column pairs of X. Pairs are independent, so the parallel schedule
// cannot affect the result.
KendallMatrix kendall_tau_matrix(const DataMatrix& x, std::size_t threads = 0);

// sin(pi/2 * tau) entrywise, diagonal pinned to exactly 1.
SigmaHat sine_transform(const KendallMatrix& t);

// cos(pi/2 * tau) entrywise, diagonal pinned to exactly 0 (= cos(pi/2)).
Matrix cosine_weight_matrix(const KendallMatrix& t);

} // namespace rocket
