#pragma once

// Random number plumbing.
//
// Two kinds of randomness are used:
//  * keyed, counter-based draws for the environment: the bits for site z are a
//    pure function of (seed, z, lane), so a lazily explored environment is the
//    same no matter in which order its sites are queried;
//  * sequential streams (one per trajectory / noise channel) for everything
//    that is inherently ordered in time.

#include <cstdint>
#include <random>

namespace rwre {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64 bits.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Maps 64 random bits to a double in the open interval (0, 1). 52 bits, so
/// the largest midpoint 1 - 2^-53 is still representable.
[[nodiscard]] constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Derives an independent 64-bit seed from a base seed and a lane tag.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t lane) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(lane + 0xA0761D6478BD642FULL));
}

/// Keyed counter-based generator: draw(counter, lane) has no hidden state.
class KeyedStream {
public:
    explicit constexpr KeyedStream(std::uint64_t seed) noexcept : key_(splitmix64(seed ^ 0x2545F4914F6CDD1DULL)) {}

    [[nodiscard]] constexpr std::uint64_t bits(std::int64_t counter, std::uint64_t lane) const noexcept {
        const auto c = static_cast<std::uint64_t>(counter);
        std::uint64_t x = splitmix64(key_ + c * 0xD1B54A32D192ED03ULL);
        return splitmix64(x ^ (lane * 0x8CB92BA72F3D8DD7ULL + 0x9E3779B97F4A7C15ULL));
    }

    [[nodiscard]] constexpr double uniform(std::int64_t counter, std::uint64_t lane) const noexcept {
        return to_open_unit(bits(counter, lane));
    }

private:
    std::uint64_t key_;
};

/// Sequential stream. std::mt19937_64 output is fixed by the standard, and the
/// conversion to (0,1) is done here, so results are portable across toolchains.
class SequentialStream {
public:
    explicit SequentialStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return to_open_unit(engine_()); }

private:
    std::mt19937_64 engine_;
};

} // namespace rwre
