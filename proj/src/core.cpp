#include "gatesim/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "Angry", "Fear", "Happy", "Sad", "Surprise", "Neutral"};

constexpr std::array<std::string_view, 80> kObjectClasses = {
    "person",        "bicycle",      "car",           "motorcycle",    "airplane",
    "bus",           "train",        "truck",         "boat",          "traffic light",
    "fire hydrant",  "stop sign",    "parking meter", "bench",         "bird",
    "cat",           "dog",          "horse",         "sheep",         "cow",
    "elephant",      "bear",         "zebra",         "giraffe",       "backpack",
    "umbrella",      "handbag",      "tie",           "suitcase",      "frisbee",
    "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat",
    "baseball glove", "skateboard",  "surfboard",     "tennis racket", "bottle",
    "wine glass",    "cup",          "fork",          "knife",         "spoon",
    "bowl",          "banana",       "apple",         "sandwich",      "orange",
    "broccoli",      "carrot",       "hot dog",       "pizza",         "donut",
    "cake",          "chair",        "couch",         "potted plant",  "bed",
    "dining table",  "toilet",       "tv",            "laptop",        "mouse",
    "remote",        "keyboard",     "cell phone",    "microwave",     "oven",
    "toaster",       "sink",         "refrigerator",  "book",          "clock",
    "vase",          "scissors",     "teddy bear",    "hair drier",    "toothbrush"};

constexpr double kScoreSumTolerance = 1e-9;

}  // namespace

std::string_view to_string(Emotion emotion) {
    return kEmotionNames.at(index_of(emotion));
}

std::optional<Emotion> parse_emotion(std::string_view name) {
    for (Emotion e : kAllEmotions) {
        if (kEmotionNames[index_of(e)] == name) return e;
    }
    return std::nullopt;
}

EmotionScores::EmotionScores(const Array& scores) : scores_(scores) {
    double sum = 0.0;
    for (double s : scores_) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ValidationError("emotion score outside [0,1]");
        }
        sum += s;
    }
    if (std::abs(sum - 1.0) > kScoreSumTolerance) {
        throw ValidationError("emotion scores do not sum to 1");
    }
}

Emotion EmotionScores::dominant() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kEmotionCount; ++i) {
        if (scores_[i] > scores_[best]) best = i;
    }
    return kAllEmotions[best];
}

std::span<const std::string_view> object_class_vocabulary() { return kObjectClasses; }

bool is_known_class(std::string_view class_label) {
    return std::find(kObjectClasses.begin(), kObjectClasses.end(), class_label) !=
           kObjectClasses.end();
}

std::vector<Detection> filter_by_confidence(std::span<const Detection> detections,
                                            double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("confidence threshold must lie in [0,1]");
    }
    std::vector<Detection> kept;
    kept.reserve(detections.size());
    std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept),
                 [threshold](const Detection& d) { return d.confidence > threshold; });
    return kept;
}

bool contains_class(std::span<const Detection> detections, std::string_view class_label) {
    return std::any_of(detections.begin(), detections.end(),
                       [class_label](const Detection& d) { return d.class_label == class_label; });
}

std::string ValidationResult::summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) out << "; ";
        const auto& v = violations[i];
        if (v.frame_index) out << "frame " << *v.frame_index << ": ";
        out << v.message;
    }
    return out.str();
}

ValidationResult validate_trace(const ScenarioTrace& trace) {
    ValidationResult result;
    auto report = [&](std::size_t position, std::optional<std::uint64_t> frame,
                      std::string message) {
        result.violations.push_back({position, frame, std::move(message)});
    };

    for (std::size_t pos = 0; pos < trace.frames.size(); ++pos) {
        const FrameTruth& frame = trace.frames[pos];
        if (frame.index != pos) {
            report(pos, frame.index,
                   "non-consecutive index at position " + std::to_string(pos));
        }

        bool has_person = false;
        for (std::size_t k = 0; k < frame.objects.size(); ++k) {
            const GroundObject& obj = frame.objects[k];
            const std::string where = "object " + std::to_string(k) + ": ";
            if (obj.class_label.empty()) {
                report(pos, frame.index, where + "empty class label");
            } else if (!is_known_class(obj.class_label)) {
                report(pos, frame.index, where + "unknown class '" + obj.class_label + "'");
            }
            if (!(obj.base_confidence >= 0.0 && obj.base_confidence <= 1.0)) {
                report(pos, frame.index, where + "confidence outside [0,1]");
            }
            if (!(obj.box.w > 0.0 && obj.box.h > 0.0)) {
                report(pos, frame.index, where + "box has non-positive extent");
            }
            has_person = has_person || obj.class_label == kPersonClass;
        }

        for (std::size_t k = 0; k < frame.faces.size(); ++k) {
            const GroundFace& face = frame.faces[k];
            const std::string where = "face " + std::to_string(k) + ": ";
            if (face.identity.empty()) {
                report(pos, frame.index, where + "empty identity");
            }
            if (!(face.box.w > 0.0 && face.box.h > 0.0)) {
                report(pos, frame.index, where + "box has non-positive extent");
            }
        }
        if (!frame.faces.empty() && !has_person) {
            report(pos, frame.index, "face present without a person object");
        }
    }
    return result;
}

}  // namespace gatesim
