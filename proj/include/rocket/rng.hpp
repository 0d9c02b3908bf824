#pragma once

#include <cstdint>

namespace rocket {

// Deterministic generator used everywhere randomness is needed.
//
// Core: xoshiro256++ (Blackman & Vigna), state seeded by splitmix64 so any
// 64-bit seed works. Variate algorithms are fixed here (Box-Muller normals,
// Marsaglia-Tsang gamma) rather than taken from <random>, whose
// distributions are implementation-defined; a (seed) pair therefore yields
// the same stream on every platform and standard library.
//
// Independent substreams come from Rng::stream(base_seed, index); the
// harness gives each Monte Carlo replication its own substream so results
// do not depend on scheduling.
// Seed for substream `index` of `base`; the mixing matches Rng::stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Substream `index` of `base_seed`; distinct (seed, index) pairs give
    // statistically independent generators.
    static Rng stream(std::uint64_t base_seed, std::uint64_t index);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform();

    // Uniform integer in {0, ..., bound-1} via rejection (unbiased).
    std::uint64_t uniform_below(std::uint64_t bound);

    // Standard normal, Box-Muller pair with one value cached.
    double normal();

    // Gamma(shape, 1), shape > 0. Marsaglia-Tsang for shape >= 1, with the
    // usual U^(1/shape) boost below 1.
    double gamma(double shape);

    // chi-square and chi with real dof > 0.
    double chi_square(double dof);
    double chi(double dof);

    // Student t with real dof > 0.
    double student_t(double dof);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace rocket
