#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rocket/errors.hpp"

namespace rocket {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// n x p observations, one sample per row.
using DataMatrix = Eigen::MatrixXd;

// Correlation matrix: symmetric, unit diagonal, off-diagonals in [-1, 1].
// Validated on construction; the wrapped matrix is immutable afterwards.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(Matrix m);

    const Matrix& mat() const { return m_; }
    Index dim() const { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }

private:
    Matrix m_;
};

// 2x2 symmetric block indexed by node labels {a, b}. Stored as the three
// distinct entries so symmetry is exact by construction.
struct ThetaBlock {
    Index a = 0;
    Index b = 0;
    double aa = 0.0;
    double ab = 0.0;
    double bb = 0.0;

    double det() const { return aa * bb - ab * ab; }
};

// I = [p] \ {a, b}, ascending node order. All vectors "over I" use this
// ordering.
std::vector<Index> index_complement(Index p, Index a, Index b);

// Max relative asymmetry |M_ij - M_ji| / max(1, |M_ij|).
double symmetry_gap(const Matrix& m);

// D^{-1/2} S D^{-1/2} with D = diag(S). Throws NonPositiveDiagonal.
CorrelationMatrix normalize_to_correlation(const Matrix& sigma0);

// Factored symmetric solve with a condition-number guard; used wherever the
// pipeline needs A^{-1} b. Construction throws IllConditioned when the
// estimated condition number exceeds cond_limit (default 1e12).
class SymmetricSolver {
public:
    explicit SymmetricSolver(const Matrix& a, double cond_limit = 1e12);

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;

private:
    Eigen::LDLT<Matrix> ldlt_;
    bool use_lu_ = false;
    Eigen::FullPivLU<Matrix> lu_;
};

Vector solve_sym(const Matrix& a, const Vector& b);

// Population regression vectors: gamma_c solves Sigma_I gamma = Sigma_{I,c}
// for c = a, b; both returned over I.
std::pair<Vector, Vector> true_gamma(const CorrelationMatrix& sigma, Index a, Index b);

// Schur complement Sigma_{ab,ab} - Sigma_{ab,I} Sigma_I^{-1} Sigma_{I,ab};
// equals the inverse of the {a,b} x {a,b} block of Sigma^{-1}.
ThetaBlock true_theta_block(const CorrelationMatrix& sigma, Index a, Index b);

struct OmegaEntry {
    double omega_ab;
    double det;
};

// Off-diagonal precision entry recovered from a 2x2 theta block:
// omega_ab = -theta_ab / det(theta). Throws SingularTheta when
// |det| < 1e-12.
OmegaEntry omega_entry_from_theta(const ThetaBlock& theta);

// Exhaustive sparse spectral norm max over k-sparse unit u, v of |u' M v|,
// computed as the largest singular value over all |S| x |T| submatrices
// with |S|, |T| <= k. Test oracle only: dim(M) must be <= 16.
double sparse_spectral_norm_exhaustive(const Matrix& m, int k);

} // namespace rocket
