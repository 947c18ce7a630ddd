#pragma once

#include <cstdint>
#include <limits>

namespace tracelab {

// Counter-based random streams. Every random quantity in a trial is a pure
// function of (key, counter...), so results do not depend on evaluation
// order, thread count, or how lazily the code matrix is materialized.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t key, std::uint64_t a) noexcept {
    return splitmix64(key ^ splitmix64(a + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t mix(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
    return mix(mix(key, a), b);
}

/// Uniform double in the open interval (0, 1) from 64 random bits.
inline constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

enum class Stream : std::uint64_t {
    bias = 1,
    code = 2,
    pirate = 3,
    coalition = 4,
    single_user = 5,
};

/// Key for one named sub-stream of a master seed.
inline constexpr std::uint64_t derive_key(std::uint64_t master_seed, Stream stream) noexcept {
    return mix(splitmix64(master_seed), static_cast<std::uint64_t>(stream));
}

/// Key for one named sub-stream of one trial.
inline constexpr std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t trial,
                                          Stream stream) noexcept {
    return mix(splitmix64(master_seed), trial, static_cast<std::uint64_t>(stream));
}

/// Sequential generator over a counter-based stream. Satisfies
/// UniformRandomBitGenerator, but prefer uniform()/index() over std::
/// distributions, whose output is implementation-defined.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key, std::uint64_t start = 0) noexcept
        : key_(key), counter_(start) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return mix(key_, counter_++); }

    constexpr double uniform() noexcept { return to_open_unit((*this)()); }

    /// Unbiased integer in [0, bound), bound > 0.
    constexpr std::uint64_t index(std::uint64_t bound) noexcept {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t r = (*this)();
        while (r >= limit) r = (*this)();
        return r % bound;
    }

    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace tracelab
