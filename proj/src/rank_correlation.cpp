#include "rocket/rank_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rocket/parallel.hpp"

namespace rocket {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("kendall_tau_pair: length mismatch");
    if (x.size() < 2) throw TooFewSamples("kendall_tau_pair: need n >= 2");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw DataError("kendall_tau_pair: non-finite input");
    }
}

bool has_ties(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) != s.end();
}

// Merge sort counting inversions, i.e. pairs i < j with v[i] > v[j].
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf) {
    const std::size_t n = v.size();
    std::int64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[i] <= v[j]) {
                    buf[k++] = v[i++];
                } else {
                    // v[i..mid) all exceed v[j]
                    inversions += static_cast<std::int64_t>(mid - i);
                    buf[k++] = v[j++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

// tau for tie-free input given y rearranged into ascending-x order:
// concordant - discordant = C(n,2) - 2 * inversions(y).
double tau_from_ordered_y(std::vector<double>& y_by_x, std::vector<double>& buf) {
    const auto n = static_cast<std::int64_t>(y_by_x.size());
    const std::int64_t pairs = n * (n - 1) / 2;
    const std::int64_t inv = count_inversions(y_by_x, buf);
    return static_cast<double>(pairs - 2 * inv) / static_cast<double>(pairs);
}

} // namespace

double kendall_tau_pair_naive(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::size_t n = x.size();
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 || dy == 0.0) continue;
            sum += ((dx > 0.0) == (dy > 0.0)) ? 1 : -1;
        }
    }
    const auto pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    return static_cast<double>(sum) / static_cast<double>(pairs);
}

double kendall_tau_pair(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    if (has_ties(x) || has_ties(y)) return kendall_tau_pair_naive(x, y);

    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });

    std::vector<double> y_by_x(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) y_by_x[i] = y[order[i]];
    return tau_from_ordered_y(y_by_x, buf);
}

KendallMatrix kendall_tau_matrix(const DataMatrix& x, std::size_t threads) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n < 2) throw TooFewSamples("kendall_tau_matrix: need n >= 2");
    if (p < 2) throw DimensionMismatch("kendall_tau_matrix: need p >= 2");

    // Sort order and tie flag once per column.
    std::vector<std::vector<std::size_t>> orders(static_cast<std::size_t>(p));
    std::vector<char> tied(static_cast<std::size_t>(p), 0);
    for (Index a = 0; a < p; ++a) {
        auto& ord = orders[static_cast<std::size_t>(a)];
        ord.resize(static_cast<std::size_t>(n));
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::sort(ord.begin(), ord.end(), [&](std::size_t i, std::size_t j) {
            return x(static_cast<Index>(i), a) < x(static_cast<Index>(j), a);
        });
        for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
            const double v0 = x(static_cast<Index>(ord[i]), a);
            const double v1 = x(static_cast<Index>(ord[i + 1]), a);
            if (!std::isfinite(v0)) throw DataError("kendall_tau_matrix: non-finite input");
            if (v0 == v1) tied[static_cast<std::size_t>(a)] = 1;
        }
    }

    KendallMatrix result;
    result.tau = Matrix::Identity(p, p);
    result.n = n;

    parallel_for(static_cast<std::size_t>(p), resolve_thread_count(threads), [&](std::size_t ai) {
        const auto a = static_cast<Index>(ai);
        std::vector<double> y_by_x(static_cast<std::size_t>(n)), buf(static_cast<std::size_t>(n));
        std::vector<double> xa, yb;
        for (Index b = a + 1; b < p; ++b) {
            double tau;
            if (!tied[ai] && !tied[static_cast<std::size_t>(b)]) {
                const auto& ord = orders[ai];
                for (std::size_t i = 0; i < ord.size(); ++i)
                    y_by_x[i] = x(static_cast<Index>(ord[i]), b);
                tau = tau_from_ordered_y(y_by_x, buf);
            } else {
                xa.assign(static_cast<std::size_t>(n), 0.0);
                yb.assign(static_cast<std::size_t>(n), 0.0);
                for (Index i = 0; i < n; ++i) {
                    xa[static_cast<std::size_t>(i)] = x(i, a);
                    yb[static_cast<std::size_t>(i)] = x(i, b);
                }
                tau = kendall_tau_pair_naive(xa, yb);
            }
            result.tau(a, b) = tau;
            result.tau(b, a) = tau;
        }
    });
    return result;
}

SigmaHat sine_transform(const KendallMatrix& t) {
    const Index p = t.dim();
    SigmaHat out;
    out.m.resize(p, p);
    for (Index i = 0; i < p; ++i) {
        out.m(i, i) = 1.0;
        for (Index j = i + 1; j < p; ++j) {
            const double v = std::sin(kHalfPi * t.tau(i, j));
            out.m(i, j) = v;
            out.m(j, i) = v;
        }
    }
    return out;
}

Matrix cosine_weight_matrix(const KendallMatrix& t) {
    const Index p = t.dim();
    Matrix out(p, p);
    for (Index i = 0; i < p; ++i) {
        out(i, i) = 0.0;
        for (Index j = i + 1; j < p; ++j) {
            const double v = std::cos(kHalfPi * t.tau(i, j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

} // namespace rocket
