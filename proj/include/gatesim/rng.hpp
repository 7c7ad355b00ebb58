#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gatesim {

// Identifies which consumer a keyed noise stream belongs to. Each gets its own
// stream so that skipping one stage never shifts another stage's samples.
enum class StreamId : std::uint64_t {
    Detect = 1,
    Embed = 2,
    Emotion = 3,
    Prototype = 4,
    Enroll = 5,
    Scenario = 6,
};

/// splitmix64 generator with Box-Muller normal sampling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    double gaussian();

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

// The splitmix64 output finalizer applied to a single word.
std::uint64_t mix64(std::uint64_t x);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// Independent stream for (seed, major, minor, id).
SplitMix64 keyed_stream(std::uint64_t seed, std::uint64_t major, std::uint64_t minor,
                        StreamId id);

}  // namespace gatesim
