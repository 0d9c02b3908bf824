#include "rocket/rng.hpp"

#include <cmath>

namespace rocket {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // Mix (base, index) into a single seed; splitmix64 drives the avalanche
    // so nearby indices give unrelated streams.
    std::uint64_t x = base;
    std::uint64_t h = splitmix64(x);
    x = h ^ (index + 0x9e3779b97f4a7c15ULL);
    return splitmix64(x);
}

Rng Rng::stream(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(derive_seed(base_seed, index));
}

std::uint64_t Rng::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    // rejection to remove modulo bias
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape) {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^{1/a}
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::chi_square(double dof) {
    return 2.0 * gamma(dof / 2.0);
}

double Rng::chi(double dof) {
    return std::sqrt(chi_square(dof));
}

double Rng::student_t(double dof) {
    const double z = normal();
    double c2;
    do {
        c2 = chi_square(dof);
    } while (c2 == 0.0);
    return z / std::sqrt(c2 / dof);
}

} // namespace rocket
