#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rocket/matrix.hpp"
#include "rocket/rng.hpp"

namespace rocket {

// Structured precision / correlation designs used by the simulations.
struct GraphSpec {
    enum class Kind { Grid, GridRect, Chain, Pair };

    Kind kind = Kind::Grid;
    Index side = 0;        // Grid: p = side^2
    Index rows = 0;        // GridRect: p = rows * cols
    Index cols = 0;
    Index p = 0;           // Chain / Pair
    double weight = 0.0;   // grid omega, chain off-diagonal, or pair rho

    static GraphSpec grid(Index side, double omega);
    static GraphSpec grid_rect(Index rows, Index cols, double omega);
    static GraphSpec chain(Index p, double rho);
    static GraphSpec pair(Index p, double rho);

    Index dim() const;
    // 1-based grid coordinates -> node index (row-major).
    Index grid_node(Index r, Index c) const;
};

// Ground-truth matrices for a design: the raw structured precision, the
// normalized latent correlation, and its inverse (the target of inference).
struct PrecisionModel {
    Matrix omega0;
    CorrelationMatrix sigma;
    Matrix omega;
};

PrecisionModel build_precision(const GraphSpec& spec);

// Law of the elliptical radius. chi(p) reproduces a Gaussian; abs_t(d) is
// |t_d|; mvt(d) is chi_p * sqrt(d) / chi_d, the multivariate-t radius.
struct RadiusLaw {
    enum class Kind { Chi, AbsT, Mvt };

    Kind kind = Kind::Chi;
    double dof = 0.0;

    static RadiusLaw chi() { return {Kind::Chi, 0.0}; }
    static RadiusLaw abs_t(double d) { return {Kind::AbsT, d}; }
    static RadiusLaw mvt(double d) { return {Kind::Mvt, d}; }

    // Strictly positive draw (resamples on exact zero).
    double draw(Rng& rng, Index p) const;
};

// Rows are i.i.d. xi * A * U with A the lower Cholesky factor of sigma and
// U uniform on the unit sphere, xi independent of U. Deterministic given
// the seed.
DataMatrix sample_elliptical(Index n, const CorrelationMatrix& sigma, const RadiusLaw& law,
                             std::uint64_t seed);

// Cyclic strictly increasing marginal transforms, column j gets
// transforms[(j mod size)].
struct MarginalSet {
    std::vector<std::function<double(double)>> transforms;

    // identity, signed square root, cube, standard normal CDF, exp.
    static MarginalSet five_standard();
    static MarginalSet identity();

    bool empty() const { return transforms.empty(); }
};

DataMatrix apply_marginals(const DataMatrix& x, const MarginalSet& marginals);

struct ContaminationSpec {
    enum class Mechanism { RandomRow, DeterministicRow, Element };

    Mechanism mechanism = Mechanism::RandomRow;
    double rate = 0.0;          // must lie in (0, 1)
    std::uint64_t seed = 0;
};

// random_row: floor(n*r) uniformly chosen rows refilled with i.i.d. t_1.5
// draws. deterministic_row: the same count of rows set to +5,-5,+5,...
// element: floor(n*p*r) uniformly chosen cells replaced by a draw from
// N(3, 3) or N(-3, 3) (variance 3) with equal probability.
DataMatrix contaminate(const DataMatrix& x, const ContaminationSpec& spec);

// Sample correlation of the exceedance indicators 1{X_a >= q_alpha} and
// 1{X_b >= q_alpha}, with empirical per-column alpha-quantiles.
double empirical_tail_dependence(const DataMatrix& x, Index a, Index b, double alpha);

// DataMatrix CSV round trip: header x1..xp, one observation per line,
// shortest round-trip decimals.
void write_data_csv(const DataMatrix& x, const std::string& path);
DataMatrix read_data_csv(const std::string& path);

} // namespace rocket
