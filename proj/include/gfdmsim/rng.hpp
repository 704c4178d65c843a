#ifndef GFDMSIM_RNG_HPP
#define GFDMSIM_RNG_HPP

#include <cmath>
#include <cstdint>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

/// xoshiro256++ with splitmix64 seeding.
///
/// Streams are derived from (master seed, id0, id1, id2) so that parallel
/// workers get disjoint, reproducible substreams without sharing state.
/// The generator is self-contained on purpose: results must be byte-identical
/// across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    static Rng derive(std::uint64_t master, std::uint64_t id0,
                      std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
        std::uint64_t x = master;
        std::uint64_t h = splitmix64(x);
        x = h ^ (id0 + 0x9e3779b97f4a7c15ull);
        h = splitmix64(x);
        x = h ^ (id1 + 0xbf58476d1ce4e5b9ull);
        h = splitmix64(x);
        x = h ^ (id2 + 0x94d049bb133111ebull);
        return Rng(splitmix64(x));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    std::uint32_t uniform_u32(std::uint32_t bound) {
        return std::uint32_t(next_u64() % bound);
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    /// Standard normal via Box-Muller (no libstdc++ dependence).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    /// Circularly-symmetric complex normal, unit variance: E|z|^2 = 1.
    cplx cnormal() {
        const double s = std::sqrt(0.5);
        return {s * normal(), s * normal()};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gfdmsim

#endif
