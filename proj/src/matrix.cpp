#include "rocket/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace rocket {

CorrelationMatrix::CorrelationMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("correlation matrix must be square");
    if (symmetry_gap(m_) > 1e-12) throw DataError("correlation matrix not symmetric");
    for (Index i = 0; i < m_.rows(); ++i) {
        if (m_(i, i) != 1.0) throw DataError("correlation matrix diagonal must be 1");
        for (Index j = 0; j < m_.cols(); ++j) {
            if (!std::isfinite(m_(i, j)) || std::fabs(m_(i, j)) > 1.0 + 1e-12)
                throw DataError("correlation entries must lie in [-1, 1]");
        }
    }
}

std::vector<Index> index_complement(Index p, Index a, Index b) {
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(p > 2 ? p - 2 : 0));
    for (Index j = 0; j < p; ++j) {
        if (j != a && j != b) idx.push_back(j);
    }
    return idx;
}

double symmetry_gap(const Matrix& m) {
    double gap = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = i + 1; j < m.cols(); ++j) {
            const double denom = std::max(1.0, std::fabs(m(i, j)));
            gap = std::max(gap, std::fabs(m(i, j) - m(j, i)) / denom);
        }
    }
    return gap;
}

CorrelationMatrix normalize_to_correlation(const Matrix& sigma0) {
    const Index p = sigma0.rows();
    Vector inv_sqrt(p);
    for (Index i = 0; i < p; ++i) {
        if (!(sigma0(i, i) > 0.0))
            throw NonPositiveDiagonal("diagonal entry " + std::to_string(i) + " is not positive");
        inv_sqrt(i) = 1.0 / std::sqrt(sigma0(i, i));
    }
    Matrix out(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) out(i, j) = sigma0(i, j) * inv_sqrt(i) * inv_sqrt(j);
        out(i, i) = 1.0;
    }
    // Enforce exact symmetry against rounding in the scaling products.
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j) out(j, i) = out(i, j);
    return CorrelationMatrix(std::move(out));
}

SymmetricSolver::SymmetricSolver(const Matrix& a, double cond_limit) {
    if (a.rows() != a.cols()) throw DimensionMismatch("solve on non-square matrix");
    if (a.rows() == 0) return;
    ldlt_.compute(a);
    bool ldlt_ok = ldlt_.info() == Eigen::Success;
    if (ldlt_ok) {
        // The l1 condition estimate alone can miss exact rank deficiency
        // (structured matrices keep the probe vector in range), so also
        // require a healthy pivot spread. For SPD input the pivots sit
        // inside the eigenvalue range, so this never rejects a matrix with
        // condition number below the limit.
        const Vector d = ldlt_.vectorD().cwiseAbs();
        const double dmax = d.maxCoeff();
        ldlt_ok = dmax > 0.0 && d.minCoeff() / dmax > 1.0 / cond_limit &&
                  ldlt_.rcond() > 1.0 / cond_limit;
    }
    if (ldlt_ok) return;
    // Indefinite or suspect: full-pivot LU is the arbiter.
    use_lu_ = true;
    lu_.compute(a);
    if (!lu_.isInvertible() || lu_.rcond() <= 1.0 / cond_limit)
        throw IllConditioned("matrix condition number exceeds " + std::to_string(cond_limit));
}

Vector SymmetricSolver::solve(const Vector& b) const {
    if (b.size() == 0) return b;
    return use_lu_ ? Vector(lu_.solve(b)) : Vector(ldlt_.solve(b));
}

Matrix SymmetricSolver::solve(const Matrix& b) const {
    if (b.rows() == 0) return b;
    return use_lu_ ? Matrix(lu_.solve(b)) : Matrix(ldlt_.solve(b));
}

Vector solve_sym(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) throw DimensionMismatch("solve_sym: dimension mismatch");
    return SymmetricSolver(a).solve(b);
}

namespace {

// Extract rows I, single column c.
Vector gather(const Matrix& m, const std::vector<Index>& rows, Index c) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = m(rows[i], c);
    return out;
}

Matrix gather(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

} // namespace

std::pair<Vector, Vector> true_gamma(const CorrelationMatrix& sigma, Index a, Index b) {
    if (a == b) throw DimensionMismatch("true_gamma requires a != b");
    const auto idx = index_complement(sigma.dim(), a, b);
    const Matrix sigma_i = gather(sigma.mat(), idx, idx);
    SymmetricSolver solver(sigma_i);
    return {solver.solve(gather(sigma.mat(), idx, a)), solver.solve(gather(sigma.mat(), idx, b))};
}

ThetaBlock true_theta_block(const CorrelationMatrix& sigma, Index a, Index b) {
    if (a == b) throw DimensionMismatch("true_theta_block requires a != b");
    const auto idx = index_complement(sigma.dim(), a, b);
    ThetaBlock theta;
    theta.a = a;
    theta.b = b;
    if (idx.empty()) {
        theta.aa = sigma(a, a);
        theta.ab = sigma(a, b);
        theta.bb = sigma(b, b);
        return theta;
    }
    const Matrix sigma_i = gather(sigma.mat(), idx, idx);
    const Vector sa = gather(sigma.mat(), idx, a);
    const Vector sb = gather(sigma.mat(), idx, b);
    SymmetricSolver solver(sigma_i);
    const Vector ga = solver.solve(sa);
    const Vector gb = solver.solve(sb);
    theta.aa = sigma(a, a) - sa.dot(ga);
    theta.ab = sigma(a, b) - sa.dot(gb);
    theta.bb = sigma(b, b) - sb.dot(gb);
    return theta;
}

OmegaEntry omega_entry_from_theta(const ThetaBlock& theta) {
    const double det = theta.det();
    if (std::fabs(det) < 1e-12) throw SingularTheta("det(theta) below 1e-12");
    return {-theta.ab / det, det};
}

namespace {

// All index subsets of {0..p-1} with exactly k elements.
void for_each_subset(Index p, int k, const std::function<void(const std::vector<Index>&)>& fn) {
    std::vector<Index> subset(static_cast<std::size_t>(k));
    std::function<void(Index, int)> rec = [&](Index start, int depth) {
        if (depth == k) {
            fn(subset);
            return;
        }
        for (Index j = start; j <= p - (k - depth); ++j) {
            subset[static_cast<std::size_t>(depth)] = j;
            rec(j + 1, depth + 1);
        }
    };
    rec(0, 0);
}

} // namespace

double sparse_spectral_norm_exhaustive(const Matrix& m, int k) {
    const Index p = m.rows();
    if (p != m.cols()) throw DimensionMismatch("sparse spectral norm needs a square matrix");
    if (p > 16) throw DimensionTooLarge("exhaustive sparse spectral norm limited to dim <= 16");
    if (k < 1) throw DimensionMismatch("k must be >= 1");
    const int kk = std::min<int>(k, static_cast<int>(p));

    // Supports of size < k are nested inside size-k supports and the leading
    // singular value is monotone under adding rows/columns, so it suffices
    // to scan |S| = |T| = k.
    std::vector<std::vector<Index>> supports;
    for_each_subset(p, kk, [&](const std::vector<Index>& s) { supports.push_back(s); });

    double best = 0.0;
    Matrix sub(kk, kk);
    for (const auto& rows : supports) {
        for (const auto& cols : supports) {
            for (int i = 0; i < kk; ++i)
                for (int j = 0; j < kk; ++j)
                    sub(i, j) = m(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
            Eigen::JacobiSVD<Matrix> svd(sub);
            best = std::max(best, svd.singularValues()(0));
        }
    }
    return best;
}

} // namespace rocket
