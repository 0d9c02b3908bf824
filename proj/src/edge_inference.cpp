#include "rocket/edge_inference.hpp"

#include <cmath>
#include <limits>

#include "rocket/normal.hpp"
#include "rocket/parallel.hpp"

namespace rocket {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kHalfPi = kPi / 2.0;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

UVVectors UVVectors::build(Index p, Index a, Index b, const Vector& gamma_a,
                           const Vector& gamma_b) {
    if (gamma_a.size() != p - 2 || gamma_b.size() != p - 2)
        throw DimensionMismatch("uv vectors: gamma length must be p - 2");
    UVVectors uv;
    uv.a = a;
    uv.b = b;
    uv.u_nodes.push_back(a);
    uv.u_vals.push_back(1.0);
    uv.v_nodes.push_back(b);
    uv.v_vals.push_back(1.0);
    const auto i_nodes = index_complement(p, a, b);
    for (std::size_t j = 0; j < i_nodes.size(); ++j) {
        const auto jj = static_cast<Index>(j);
        if (gamma_a(jj) != 0.0) {
            uv.u_nodes.push_back(i_nodes[j]);
            uv.u_vals.push_back(-gamma_a(jj));
        }
        if (gamma_b(jj) != 0.0) {
            uv.v_nodes.push_back(i_nodes[j]);
            uv.v_vals.push_back(-gamma_b(jj));
        }
    }
    return uv;
}

ThetaBlock theta_hat(const SigmaHat& sigma, const Vector& gamma_a, const Vector& gamma_b, Index a,
                     Index b) {
    const Index p = sigma.dim();
    if (gamma_a.size() != p - 2 || gamma_b.size() != p - 2)
        throw DimensionMismatch("theta_hat: gamma length must be p - 2");
    const auto i_nodes = index_complement(p, a, b);

    // Support-restricted accumulation; gamma vectors are sparse after the
    // soft-threshold / refit stage.
    std::vector<Index> sup_a, sup_b;
    for (Index j = 0; j < gamma_a.size(); ++j)
        if (gamma_a(j) != 0.0) sup_a.push_back(j);
    for (Index j = 0; j < gamma_b.size(); ++j)
        if (gamma_b(j) != 0.0) sup_b.push_back(j);

    auto dot_col = [&](const std::vector<Index>& sup, const Vector& g, Index c) {
        double acc = 0.0;
        for (Index j : sup) acc += g(j) * sigma(i_nodes[static_cast<std::size_t>(j)], c);
        return acc;
    };
    auto quad = [&](const std::vector<Index>& sup1, const Vector& g1,
                    const std::vector<Index>& sup2, const Vector& g2) {
        double acc = 0.0;
        for (Index j : sup1) {
            const Index node_j = i_nodes[static_cast<std::size_t>(j)];
            double inner = 0.0;
            for (Index k : sup2) inner += sigma(node_j, i_nodes[static_cast<std::size_t>(k)]) * g2(k);
            acc += g1(j) * inner;
        }
        return acc;
    };

    ThetaBlock theta;
    theta.a = a;
    theta.b = b;
    theta.aa = sigma(a, a) - 2.0 * dot_col(sup_a, gamma_a, a) + quad(sup_a, gamma_a, sup_a, gamma_a);
    theta.bb = sigma(b, b) - 2.0 * dot_col(sup_b, gamma_b, b) + quad(sup_b, gamma_b, sup_b, gamma_b);
    theta.ab = sigma(a, b) - dot_col(sup_a, gamma_a, b) - dot_col(sup_b, gamma_b, a) +
               quad(sup_a, gamma_a, sup_b, gamma_b);
    return theta;
}

double g_kernel_value(const std::vector<int>& s, const UVVectors& uv, const Matrix& cos_weights) {
    double acc = 0.0;
    for (std::size_t j = 0; j < uv.u_nodes.size(); ++j) {
        const int sj = s[static_cast<std::size_t>(uv.u_nodes[j])];
        if (sj == 0) continue;
        const double wj = uv.u_vals[j] * sj;
        double inner = 0.0;
        for (std::size_t k = 0; k < uv.v_nodes.size(); ++k) {
            const int sk = s[static_cast<std::size_t>(uv.v_nodes[k])];
            if (sk == 0) continue;
            inner += cos_weights(uv.u_nodes[j], uv.v_nodes[k]) * uv.v_vals[k] * sk;
        }
        acc += wj * inner;
    }
    return acc;
}

double s_ab_variance(const DataMatrix& x, const UVVectors& uv, const KendallMatrix& t,
                     const ThetaBlock& theta, std::size_t threads) {
    const Index n = x.rows();
    if (n < 3) throw TooFewSamples("s_ab_variance: need n >= 3");
    const double det = theta.det();
    if (std::fabs(det) < 1e-12) throw SingularTheta("s_ab_variance: det(theta) below 1e-12");

    const auto su = static_cast<Index>(uv.u_nodes.size());
    const auto sv = static_cast<Index>(uv.v_nodes.size());

    // cos(pi/2 * tau) on the support block only; same values as the full
    // cosine weight matrix (diagonal rule included).
    Matrix c(su, sv);
    for (Index j = 0; j < su; ++j) {
        for (Index k = 0; k < sv; ++k) {
            const Index nj = uv.u_nodes[static_cast<std::size_t>(j)];
            const Index nk = uv.v_nodes[static_cast<std::size_t>(k)];
            c(j, k) = (nj == nk) ? 0.0 : std::cos(kHalfPi * t.tau(nj, nk));
        }
    }

    // Support-restricted copies of the data, column-contiguous.
    Matrix xu(n, su), xv(n, sv);
    for (Index j = 0; j < su; ++j) xu.col(j) = x.col(uv.u_nodes[static_cast<std::size_t>(j)]);
    for (Index k = 0; k < sv; ++k) xv.col(k) = x.col(uv.v_nodes[static_cast<std::size_t>(k)]);

    // Row sums h_i = sum_{i' != i} g(X_i, X_i'). Each row is accumulated
    // independently in ascending i' order; the kernel is symmetric, so every
    // pair is visited twice and the pair total is sum(h)/2. This costs 2x
    // the minimal work but makes the reduction order independent of the
    // thread count.
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), resolve_thread_count(threads), [&](std::size_t ii) {
        const auto i = static_cast<Index>(ii);
        KahanSum row;
        Vector wu(su);
        for (Index ip = 0; ip < n; ++ip) {
            if (ip == i) continue;
            for (Index j = 0; j < su; ++j) {
                const double d = xu(i, j) - xu(ip, j);
                wu(j) = (d > 0.0) ? uv.u_vals[static_cast<std::size_t>(j)]
                                  : (d < 0.0 ? -uv.u_vals[static_cast<std::size_t>(j)] : 0.0);
            }
            double val = 0.0;
            for (Index k = 0; k < sv; ++k) {
                const double d = xv(i, k) - xv(ip, k);
                if (d == 0.0) continue;
                double inner = 0.0;
                for (Index j = 0; j < su; ++j) inner += wu(j) * c(j, k);
                val += inner * (d > 0.0 ? uv.v_vals[static_cast<std::size_t>(k)]
                                        : -uv.v_vals[static_cast<std::size_t>(k)]);
            }
            row.add(val);
        }
        h[ii] = row.sum;
    });

    KahanSum total;
    for (double v : h) total.add(v);
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double mean = total.sum / 2.0 / pairs;

    KahanSum ss;
    for (double v : h) {
        const double centered = v / static_cast<double>(n - 1) - mean;
        ss.add(centered * centered);
    }
    // The scale is a standard deviation; an indefinite theta block (possible
    // for degenerate samples) only contributes |det|.
    return kPi / std::fabs(det) * std::sqrt(ss.sum / static_cast<double>(n));
}

Interval confidence_interval(double omega_ab, double s_ab, Index n, double alpha) {
    if (s_ab < 0.0) throw DataError("confidence_interval: negative variance scale");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const double half = stats::two_sided_quantile(alpha) * s_ab / std::sqrt(static_cast<double>(n));
    return {omega_ab - half, omega_ab + half};
}

ZTest z_and_pvalue(double omega_ab, double s_ab, Index n) {
    if (s_ab <= 0.0) throw ZeroVariance("z test: variance scale is zero");
    const double z = std::sqrt(static_cast<double>(n)) * omega_ab / s_ab;
    return {z, stats::two_sided_pvalue(z)};
}

RankEstimate rank_estimate(const DataMatrix& x, std::size_t threads) {
    RankEstimate est;
    est.tau = kendall_tau_matrix(x, threads);
    est.sigma = sine_transform(est.tau);
    return est;
}

namespace {

EdgeInference finish_edge(const DataMatrix& x, const RankEstimate& rank, GammaPair pair, Index a,
                          Index b, double alpha, std::size_t threads) {
    EdgeInference out;
    out.a = a;
    out.b = b;
    out.n = x.rows();
    out.alpha = alpha;
    out.gamma = std::move(pair);
    if (!out.gamma.lasso_converged) out.warnings |= kWarnNotConverged;
    if (out.gamma.ridge_fallback) out.warnings |= kWarnRidgeFallback;

    out.theta = theta_hat(rank.sigma, out.gamma.gamma_a, out.gamma.gamma_b, a, b);
    const auto entry = omega_entry_from_theta(out.theta);
    out.omega_ab = entry.omega_ab;

    const auto uv = UVVectors::build(x.cols(), a, b, out.gamma.gamma_a, out.gamma.gamma_b);
    out.s_ab = s_ab_variance(x, uv, rank.tau, out.theta, threads);

    if (out.s_ab <= 0.0) {
        out.warnings |= kWarnZeroVariance;
        out.z = std::numeric_limits<double>::quiet_NaN();
        out.p_value = std::numeric_limits<double>::quiet_NaN();
        out.ci_lo = std::numeric_limits<double>::quiet_NaN();
        out.ci_hi = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const auto test = z_and_pvalue(out.omega_ab, out.s_ab, out.n);
    out.z = test.z;
    out.p_value = test.p_value;
    const auto ci = confidence_interval(out.omega_ab, out.s_ab, out.n, alpha);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
    return out;
}

} // namespace

EdgeInference rocket_edge(const DataMatrix& x, Index a, Index b, const LassoConfig& cfg,
                          double alpha, const RankEstimate* precomputed, std::size_t threads) {
    if (x.rows() < 3 || x.cols() < 3) throw TooFewSamples("rocket_edge: need n >= 3 and p >= 3");
    if (a == b || a < 0 || b < 0 || a >= x.cols() || b >= x.cols())
        throw DimensionMismatch("rocket_edge: invalid node pair");
    RankEstimate local;
    const RankEstimate* rank = precomputed;
    if (rank == nullptr) {
        local = rank_estimate(x, threads);
        rank = &local;
    }
    GammaPair pair = gamma_pair_pipeline(rank->sigma, a, b, cfg);
    return finish_edge(x, *rank, std::move(pair), a, b, alpha, threads);
}

EdgeInference rocket_edge_cached(const DataMatrix& x, const RankEstimate& rank,
                                 const NodeRegressions& cache, Index a, Index b,
                                 const LassoConfig& cfg, double alpha, std::size_t threads) {
    GammaPair pair = gamma_pair_from_cache(rank.sigma, cache, a, b, cfg);
    return finish_edge(x, rank, std::move(pair), a, b, alpha, threads);
}

} // namespace rocket
