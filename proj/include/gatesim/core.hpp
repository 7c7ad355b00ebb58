#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gatesim {

inline constexpr double kCanvasWidth = 640.0;
inline constexpr double kCanvasHeight = 480.0;
inline constexpr std::string_view kPersonClass = "person";

struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const Box&) const = default;
};

// Declaration order is the tie-break order for dominant-emotion extraction.
enum class Emotion : std::uint8_t { Angry, Fear, Happy, Sad, Surprise, Neutral };

inline constexpr std::size_t kEmotionCount = 6;
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Angry, Emotion::Fear,     Emotion::Happy,
    Emotion::Sad,   Emotion::Surprise, Emotion::Neutral};

std::string_view to_string(Emotion emotion);
std::optional<Emotion> parse_emotion(std::string_view name);

inline constexpr std::size_t index_of(Emotion emotion) {
    return static_cast<std::size_t>(emotion);
}

/// A six-way probability distribution over emotion labels.
///
/// Construction validates that every entry lies in [0,1] and that the entries
/// sum to 1 within 1e-9.
class EmotionScores {
public:
    using Array = std::array<double, kEmotionCount>;

    explicit EmotionScores(const Array& scores);

    double operator[](Emotion emotion) const { return scores_[index_of(emotion)]; }
    const Array& values() const { return scores_; }

    // Argmax; ties resolve to the label declared first in Emotion.
    Emotion dominant() const;
    double dominant_score() const { return (*this)[dominant()]; }

    bool operator==(const EmotionScores&) const = default;

private:
    Array scores_;
};

struct GroundObject {
    std::string class_label;
    double base_confidence = 0.0;
    Box box;

    bool operator==(const GroundObject&) const = default;
};

struct GroundFace {
    std::string identity;
    Emotion true_emotion = Emotion::Neutral;
    Box box;

    bool operator==(const GroundFace&) const = default;
};

struct FrameTruth {
    std::uint64_t index = 0;
    std::vector<GroundObject> objects;
    std::vector<GroundFace> faces;

    bool operator==(const FrameTruth&) const = default;
};

struct ScenarioTrace {
    std::uint32_t version = 1;
    std::uint64_t seed = 0;
    std::vector<FrameTruth> frames;

    bool operator==(const ScenarioTrace&) const = default;
};

struct Detection {
    std::string class_label;
    double confidence = 0.0;
    Box box;

    bool operator==(const Detection&) const = default;
};

// The 80-name object vocabulary ground-truth objects are drawn from.
std::span<const std::string_view> object_class_vocabulary();
bool is_known_class(std::string_view class_label);

// Keeps detections whose confidence is strictly above the threshold, in order.
// Throws ValidationError if threshold is outside [0,1].
std::vector<Detection> filter_by_confidence(std::span<const Detection> detections,
                                            double threshold);

// Exact, case-sensitive label comparison.
bool contains_class(std::span<const Detection> detections, std::string_view class_label);

struct Violation {
    std::size_t position = 0;  // position of the frame in the trace
    std::optional<std::uint64_t> frame_index;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationResult validate_trace(const ScenarioTrace& trace);

}  // namespace gatesim
