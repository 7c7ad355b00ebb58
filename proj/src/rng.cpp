#include "gatesim/rng.hpp"

#include <cmath>
#include <numbers>

namespace gatesim {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
}

double SplitMix64::uniform() {
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    // Rejection keeps the draw unbiased for any n.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

double SplitMix64::gaussian() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SplitMix64 keyed_stream(std::uint64_t seed, std::uint64_t major, std::uint64_t minor,
                        StreamId id) {
    std::uint64_t k = mix64(seed + kGoldenGamma);
    k = mix64(k ^ (major + kGoldenGamma));
    k = mix64(k ^ (minor + 2 * kGoldenGamma));
    k = mix64(k ^ (static_cast<std::uint64_t>(id) + 3 * kGoldenGamma));
    return SplitMix64(k);
}

}  // namespace gatesim
