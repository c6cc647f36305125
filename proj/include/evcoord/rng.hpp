#pragma once

#include <cstdint>

namespace evcoord {

// splitmix64 finalizer. All randomness in the project is built on this so
// that results are bit-identical across platforms and processes; the
// standard <random> distributions make no such guarantee.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Maps a 64-bit word to a double in [0, 1).
constexpr double unit_double(std::uint64_t u) noexcept {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

/// Sequential deterministic generator used by the scenario generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() noexcept { return unit_double(next()); }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n). n must be positive. Modulo bias is
    /// irrelevant here; determinism is what matters.
    std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

    /// Uniform integer in [lo, hi].
    long uniform_int(long lo, long hi) noexcept {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

/// Counter-based stream: a draw is a pure function of (seed, key words).
/// Used for disturbance realizations so that every strategy compared on the
/// same scenario seed faces identical noise.
class KeyedStream {
public:
    explicit KeyedStream(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t word(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d) const noexcept {
        std::uint64_t h = mix64(seed_);
        h = mix64(h ^ a);
        h = mix64(h ^ b);
        h = mix64(h ^ c);
        h = mix64(h ^ d);
        return h;
    }

    /// Uniform in [-bound, +bound]; exactly 0 when bound is 0.
    double symmetric(double bound, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c, std::uint64_t d) const noexcept {
        const double u = unit_double(word(a, b, c, d));
        return bound * (2.0 * u - 1.0);
    }

private:
    std::uint64_t seed_;
};

}  // namespace evcoord
