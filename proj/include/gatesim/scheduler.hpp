#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gatesim/core.hpp"
#include "gatesim/embedding_store.hpp"
#include "gatesim/errors.hpp"
#include "gatesim/stages.hpp"

namespace gatesim {

enum class PolicyMode : std::uint8_t { Adaptive, Baseline };
enum class EmotionScope : std::uint8_t { OwnerOnly, AllFaces };

std::string_view to_string(PolicyMode mode);
std::string_view to_string(EmotionScope scope);
PolicyMode parse_policy_mode(std::string_view name);
EmotionScope parse_emotion_scope(std::string_view name);

/// Rules deciding which stages run on a frame.
///
/// Adaptive: detection always; face matching on frames where
/// index % face_period == 0 and the trigger class survives confidence
/// filtering; emotion per emotion_scope on matched faces.
/// Baseline: every stage on every frame for every face (period, trigger and
/// emotion_scope are ignored).
struct GatingPolicy {
    PolicyMode mode = PolicyMode::Adaptive;
    std::uint32_t face_period = 5;
    std::string face_trigger_class = std::string(kPersonClass);
    EmotionScope emotion_scope = EmotionScope::OwnerOnly;
    double confidence_threshold = 0.5;
    double match_threshold = kDefaultMatchThreshold;

    static GatingPolicy adaptive() { return {}; }
    static GatingPolicy baseline();

    // Scope actually applied; baseline always covers all faces.
    EmotionScope effective_emotion_scope() const {
        return mode == PolicyMode::Baseline ? EmotionScope::AllFaces : emotion_scope;
    }
    void validate() const;
};

struct ExecutionPlan {
    bool run_detect = true;
    bool run_face = false;
    // Filled once match outcomes are known; nonempty implies run_face.
    std::vector<std::size_t> run_emotion_for;
};

enum class AnnotationKind : std::uint8_t { OwnerGreen, UnknownRed, ObjectBox, EmotionLabel };

std::string_view to_string(AnnotationKind kind);

struct AnnotationEvent {
    AnnotationKind kind = AnnotationKind::ObjectBox;
    std::string label;
    Box box;

    bool operator==(const AnnotationEvent&) const = default;
};

struct FaceEmotion {
    std::size_t face_ordinal = 0;
    EmotionScores scores;

    bool operator==(const FaceEmotion&) const = default;
};

struct StageCosts {
    double overhead_ms = 0.0;
    double detect_ms = 0.0;
    double face_ms = 0.0;
    double emotion_ms = 0.0;

    double module_ms() const { return detect_ms + face_ms + emotion_ms; }
    double total_ms() const { return overhead_ms + module_ms(); }

    bool operator==(const StageCosts&) const = default;
};

struct FrameResult {
    std::uint64_t frame_index = 0;
    ExecutionPlan plan;
    // Confidence-filtered detections.
    std::vector<Detection> detections;
    // One entry per trace face when the face stage ran, indexed by face ordinal.
    std::vector<MatchResult> matches;
    std::vector<FaceEmotion> emotions;
    std::vector<AnnotationEvent> annotations;
    StageCosts costs;
    double cost_ms = 0.0;

    bool ran_face() const { return plan.run_face; }
};

// Decides run_face from the frame index and filtered detections.
ExecutionPlan plan_frame(std::uint64_t frame_index, std::span<const Detection> filtered_detections,
                         const GatingPolicy& policy);

// Selects the faces whose emotion is classified, given the match outcomes.
std::vector<std::size_t> emotion_targets(const ExecutionPlan& plan,
                                         std::span<const MatchResult> matches,
                                         const GatingPolicy& policy);

/// Immutable inputs shared by every frame of a run.
struct PipelineContext {
    GatingPolicy policy;
    StageCostModel cost_model;
    NoiseConfig noise;
    const OwnerDatabase* database = nullptr;
    const IdentityPrototypes* prototypes = nullptr;
};

// Runs mock detection and confidence filtering for a frame.
std::vector<Detection> detect_frame(const FrameTruth& frame, const PipelineContext& ctx);

// Executes the face and emotion stages of a plan computed from `filtered`.
// Throws ConfigError when the face stage runs without a database or prototypes.
FrameResult execute_frame(const FrameTruth& frame, std::vector<Detection> filtered,
                          ExecutionPlan plan, const PipelineContext& ctx);

// detect_frame + plan_frame + execute_frame.
FrameResult process_frame(const FrameTruth& frame, const PipelineContext& ctx);

class PipelineError : public Error {
public:
    PipelineError(std::uint64_t frame_index, const std::string& message)
        : Error("frame " + std::to_string(frame_index) + ": " + message),
          frame_index_(frame_index) {}
    std::uint64_t frame_index() const { return frame_index_; }

private:
    std::uint64_t frame_index_;
};

// One FrameResult per frame, in trace order.
std::vector<FrameResult> run_pipeline(const ScenarioTrace& trace, const PipelineContext& ctx);

}  // namespace gatesim
