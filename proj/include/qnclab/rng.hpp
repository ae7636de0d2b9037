#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qnclab {

// All randomness in the project flows through this wrapper so that results
// are reproducible bit-for-bit across platforms and library versions.
// std::mt19937_64 is fully specified by the standard; the distributions in
// <random> are not, so sampling is done by hand here.
//
// Seed derivation is counter-based: substream c of a master seed s is
// split_seed(s, c), the c-th output of a SplitMix64 stream started at s.
// Trial t of a run uses split_seed(master, t); within a trial, each role
// (graph, sources, coefficients, ...) uses split_seed(trial_seed, role).
// Because derivation never depends on execution order, trial-level
// concurrency cannot perturb results.

inline constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t z = master + (counter + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Fixed role counters for per-trial substreams.
enum class SeedRole : std::uint64_t {
    Graph = 1,
    Sources = 2,
    Coefficients = 3,
    Forwarding = 4,
    Noise = 5,
};

inline constexpr std::uint64_t role_seed(std::uint64_t trial_seed, SeedRole role) {
    return split_seed(trial_seed, static_cast<std::uint64_t>(role));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    // +magnitude or -magnitude with probability 1/2 each.
    double next_sign(double magnitude) { return next_bool() ? magnitude : -magnitude; }

    // Unbiased uniform on {0, ..., n-1} (Lemire multiply-shift with rejection).
    std::uint64_t next_below(std::uint64_t n) {
        using u128 = unsigned __int128;
        u128 m = static_cast<u128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<u128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via Box-Muller; pairs are cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qnclab
