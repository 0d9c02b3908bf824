#include "rocket/synthetic_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rocket/csv.hpp"
#include "rocket/normal.hpp"

namespace rocket {

GraphSpec GraphSpec::grid(Index side, double omega) {
    GraphSpec s;
    s.kind = Kind::Grid;
    s.side = side;
    s.weight = omega;
    return s;
}

GraphSpec GraphSpec::grid_rect(Index rows, Index cols, double omega) {
    GraphSpec s;
    s.kind = Kind::GridRect;
    s.rows = rows;
    s.cols = cols;
    s.weight = omega;
    return s;
}

GraphSpec GraphSpec::chain(Index p, double rho) {
    GraphSpec s;
    s.kind = Kind::Chain;
    s.p = p;
    s.weight = rho;
    return s;
}

GraphSpec GraphSpec::pair(Index p, double rho) {
    GraphSpec s;
    s.kind = Kind::Pair;
    s.p = p;
    s.weight = rho;
    return s;
}

Index GraphSpec::dim() const {
    switch (kind) {
        case Kind::Grid: return side * side;
        case Kind::GridRect: return rows * cols;
        case Kind::Chain:
        case Kind::Pair: return p;
    }
    return 0;
}

Index GraphSpec::grid_node(Index r, Index c) const {
    const Index ncols = (kind == Kind::Grid) ? side : cols;
    return (r - 1) * ncols + (c - 1);
}

namespace {

Matrix grid_precision(Index nrows, Index ncols, double omega) {
    const Index p = nrows * ncols;
    Matrix m = Matrix::Identity(p, p);
    auto node = [ncols](Index r, Index c) { return r * ncols + c; };
    for (Index r = 0; r < nrows; ++r) {
        for (Index c = 0; c < ncols; ++c) {
            if (c + 1 < ncols) {
                m(node(r, c), node(r, c + 1)) = omega;
                m(node(r, c + 1), node(r, c)) = omega;
            }
            if (r + 1 < nrows) {
                m(node(r, c), node(r + 1, c)) = omega;
                m(node(r + 1, c), node(r, c)) = omega;
            }
        }
    }
    return m;
}

Matrix invert_spd(const Matrix& m, const char* what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
    return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

} // namespace

PrecisionModel build_precision(const GraphSpec& spec) {
    const Index p = spec.dim();
    if (p < 2) throw ConfigError("graph needs p >= 2");

    Matrix omega0;
    switch (spec.kind) {
        case GraphSpec::Kind::Grid:
            if (spec.side < 2) throw ConfigError("grid side must be >= 2");
            omega0 = grid_precision(spec.side, spec.side, spec.weight);
            break;
        case GraphSpec::Kind::GridRect:
            if (spec.rows < 1 || spec.cols < 1) throw ConfigError("grid dimensions must be positive");
            omega0 = grid_precision(spec.rows, spec.cols, spec.weight);
            break;
        case GraphSpec::Kind::Chain: {
            omega0 = Matrix::Identity(p, p);
            for (Index j = 0; j + 1 < p; ++j) {
                omega0(j, j + 1) = spec.weight;
                omega0(j + 1, j) = spec.weight;
            }
            break;
        }
        case GraphSpec::Kind::Pair: {
            // Correlation given directly; no inversion/normalization step.
            if (std::fabs(spec.weight) >= 1.0) throw ConfigError("pair rho must lie in (-1, 1)");
            Matrix sigma = Matrix::Identity(p, p);
            sigma(0, 1) = spec.weight;
            sigma(1, 0) = spec.weight;
            Matrix omega = invert_spd(sigma, "pair correlation");
            PrecisionModel model{std::move(omega), CorrelationMatrix(std::move(sigma)), Matrix()};
            model.omega = model.omega0;
            return model;
        }
    }

    const Matrix sigma0 = invert_spd(omega0, "structured precision");
    CorrelationMatrix sigma = normalize_to_correlation(sigma0);
    Matrix omega = invert_spd(sigma.mat(), "normalized correlation");
    return PrecisionModel{std::move(omega0), std::move(sigma), std::move(omega)};
}

double RadiusLaw::draw(Rng& rng, Index p) const {
    double v = 0.0;
    do {
        switch (kind) {
            case Kind::Chi:
                v = rng.chi(static_cast<double>(p));
                break;
            case Kind::AbsT:
                v = std::fabs(rng.student_t(dof));
                break;
            case Kind::Mvt:
                v = rng.chi(static_cast<double>(p)) * std::sqrt(dof) / rng.chi(dof);
                break;
        }
    } while (v == 0.0);
    return v;
}

DataMatrix sample_elliptical(Index n, const CorrelationMatrix& sigma, const RadiusLaw& law,
                             std::uint64_t seed) {
    const Index p = sigma.dim();
    Eigen::LLT<Matrix> llt(sigma.mat());
    if (llt.info() != Eigen::Success) throw CholeskyFailure("correlation matrix is not positive definite");
    const Matrix chol = llt.matrixL();

    Rng rng(seed);
    DataMatrix x(n, p);
    Vector z(p);
    for (Index i = 0; i < n; ++i) {
        double norm2;
        do {
            for (Index j = 0; j < p; ++j) z(j) = rng.normal();
            norm2 = z.squaredNorm();
        } while (norm2 == 0.0);
        const double xi = law.draw(rng, p);
        x.row(i) = (xi / std::sqrt(norm2)) * (chol * z).transpose();
    }
    return x;
}

MarginalSet MarginalSet::five_standard() {
    MarginalSet m;
    m.transforms = {
        [](double v) { return v; },
        [](double v) { return std::copysign(std::sqrt(std::fabs(v)), v); },
        [](double v) { return v * v * v; },
        [](double v) { return stats::norm_cdf(v); },
        [](double v) { return std::exp(v); },
    };
    return m;
}

MarginalSet MarginalSet::identity() {
    MarginalSet m;
    m.transforms = {[](double v) { return v; }};
    return m;
}

DataMatrix apply_marginals(const DataMatrix& x, const MarginalSet& marginals) {
    if (marginals.empty()) return x;
    DataMatrix out(x.rows(), x.cols());
    const std::size_t cycle = marginals.transforms.size();
    for (Index j = 0; j < x.cols(); ++j) {
        const auto& f = marginals.transforms[static_cast<std::size_t>(j) % cycle];
        for (Index i = 0; i < x.rows(); ++i) out(i, j) = f(x(i, j));
    }
    return out;
}

namespace {

// First k slots of a seeded Fisher-Yates pass: a uniform k-subset, in
// deterministic order.
std::vector<Index> sample_without_replacement(Index total, Index k, Rng& rng) {
    std::vector<Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        const auto j = i + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(total - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

} // namespace

DataMatrix contaminate(const DataMatrix& x, const ContaminationSpec& spec) {
    if (!(spec.rate > 0.0 && spec.rate < 1.0)) throw RateOutOfRange("contamination rate must lie in (0, 1)");
    const Index n = x.rows();
    const Index p = x.cols();
    DataMatrix out = x;
    Rng rng(spec.seed);

    switch (spec.mechanism) {
        case ContaminationSpec::Mechanism::RandomRow: {
            const auto count = static_cast<Index>(std::floor(static_cast<double>(n) * spec.rate));
            for (Index row : sample_without_replacement(n, count, rng)) {
                for (Index j = 0; j < p; ++j) out(row, j) = rng.student_t(1.5);
            }
            break;
        }
        case ContaminationSpec::Mechanism::DeterministicRow: {
            const auto count = static_cast<Index>(std::floor(static_cast<double>(n) * spec.rate));
            for (Index row : sample_without_replacement(n, count, rng)) {
                for (Index j = 0; j < p; ++j) out(row, j) = (j % 2 == 0) ? 5.0 : -5.0;
            }
            break;
        }
        case ContaminationSpec::Mechanism::Element: {
            const auto count =
                static_cast<Index>(std::floor(static_cast<double>(n) * static_cast<double>(p) * spec.rate));
            const double sd = std::sqrt(3.0);
            for (Index cell : sample_without_replacement(n * p, count, rng)) {
                const Index i = cell / p;
                const Index j = cell % p;
                const double mu = (rng.uniform() < 0.5) ? 3.0 : -3.0;
                out(i, j) = mu + sd * rng.normal();
            }
            break;
        }
    }
    return out;
}

double empirical_tail_dependence(const DataMatrix& x, Index a, Index b, double alpha) {
    const Index n = x.rows();
    if (n < 10) throw TooFewSamples("tail dependence needs n >= 10");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

    auto quantile = [&](Index col) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = x(i, col);
        std::sort(v.begin(), v.end());
        auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n))) - 1;
        k = std::min(k, v.size() - 1);
        return v[k];
    };

    const double qa = quantile(a);
    const double qb = quantile(b);
    double na = 0, nb = 0, nab = 0;
    for (Index i = 0; i < n; ++i) {
        const bool ia = x(i, a) >= qa;
        const bool ib = x(i, b) >= qb;
        na += ia;
        nb += ib;
        nab += ia && ib;
    }
    const double pa = na / static_cast<double>(n);
    const double pb = nb / static_cast<double>(n);
    const double va = pa * (1.0 - pa);
    const double vb = pb * (1.0 - pb);
    if (va == 0.0 || vb == 0.0) throw DegenerateIndicator("exceedance indicator is constant");
    const double cov = nab / static_cast<double>(n) - pa * pb;
    return cov / std::sqrt(va * vb);
}

void write_data_csv(const DataMatrix& x, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path + " for writing");
    std::vector<std::string> row(static_cast<std::size_t>(x.cols()));
    for (Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = "x" + std::to_string(j + 1);
    csv::write_row(os, row);
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j)
            row[static_cast<std::size_t>(j)] = csv::format_double(x(i, j));
        csv::write_row(os, row);
    }
}

DataMatrix read_data_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    const auto rows = csv::read_rows(is);
    if (rows.size() < 2) throw DataError(path + ": need a header row and at least one observation");
    const std::size_t p = rows[0].size();
    if (p == 0) throw DataError(path + ": empty header");
    DataMatrix x(static_cast<Index>(rows.size() - 1), static_cast<Index>(p));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != p)
            throw DataError(path + ": row " + std::to_string(i) + " has wrong field count");
        for (std::size_t j = 0; j < p; ++j) {
            try {
                x(static_cast<Index>(i - 1), static_cast<Index>(j)) = std::stod(rows[i][j]);
            } catch (const std::exception&) {
                throw DataError(path + ": cannot parse '" + rows[i][j] + "' as a number");
            }
        }
    }
    return x;
}

} // namespace rocket
