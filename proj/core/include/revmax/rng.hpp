#pragma once

#include <cstdint>
#include <initializer_list>

namespace revmax {

/// Name of the generator recorded in run metadata.
inline constexpr const char* kRngAlgorithm = "pcg32/splitmix64-streams";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic 32-bit PCG with splitmix-derived substreams. Every stream
/// is identified by (root seed, key path); deriving the same path twice
/// yields the same stream, which is what makes parallel sampling and
/// reruns reproducible independent of thread count.
class Rng {
public:
    Rng() : Rng(0) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::uint64_t hi = detail::splitmix64(s);
        std::uint64_t lo = detail::splitmix64(s);
        state_ = hi;
        inc_ = lo | 1ULL;
        next_u32();
        next_u32();
    }

    /// Derives an independent stream from a seed and a key path.
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18U) ^ old) >> 27U);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59U);
        return (xorshifted >> rot) | (xorshifted << ((32U - rot) & 31U));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    /// Unbiased uniform integer in [0, bound); Lemire's method with rejection.
    std::uint32_t next_below(std::uint32_t bound) {
        std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
        std::uint32_t low = static_cast<std::uint32_t>(m);
        if (low < bound) {
            std::uint32_t threshold = (0U - bound) % bound;
            while (low < threshold) {
                m = static_cast<std::uint64_t>(next_u32()) * bound;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

/// Deterministic seed for a (root seed, key path) pair; the same path
/// always yields the same value.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = seed;
    for (std::uint64_t k : keys) {
        s = detail::splitmix64(s) ^ (k * 0x9e3779b97f4a7c15ULL);
    }
    return detail::splitmix64(s);
}

inline Rng Rng::stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

} // namespace revmax
