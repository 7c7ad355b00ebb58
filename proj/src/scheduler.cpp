#include "gatesim/scheduler.hpp"

#include <cmath>

namespace gatesim {

std::string_view to_string(PolicyMode mode) {
    return mode == PolicyMode::Adaptive ? "adaptive" : "baseline";
}

std::string_view to_string(EmotionScope scope) {
    return scope == EmotionScope::OwnerOnly ? "owner_only" : "all_faces";
}

PolicyMode parse_policy_mode(std::string_view name) {
    if (name == "adaptive") return PolicyMode::Adaptive;
    if (name == "baseline") return PolicyMode::Baseline;
    throw ValidationError("policy.mode must be 'adaptive' or 'baseline', got '" +
                          std::string(name) + "'");
}

EmotionScope parse_emotion_scope(std::string_view name) {
    if (name == "owner_only") return EmotionScope::OwnerOnly;
    if (name == "all_faces") return EmotionScope::AllFaces;
    throw ValidationError("policy.emotion_scope must be 'owner_only' or 'all_faces', got '" +
                          std::string(name) + "'");
}

std::string_view to_string(AnnotationKind kind) {
    switch (kind) {
        case AnnotationKind::OwnerGreen: return "owner_green";
        case AnnotationKind::UnknownRed: return "unknown_red";
        case AnnotationKind::ObjectBox: return "object_box";
        case AnnotationKind::EmotionLabel: return "emotion_label";
    }
    return "object_box";
}

GatingPolicy GatingPolicy::baseline() {
    GatingPolicy p;
    p.mode = PolicyMode::Baseline;
    p.emotion_scope = EmotionScope::AllFaces;
    return p;
}

void GatingPolicy::validate() const {
    if (face_period < 1) throw ValidationError("policy.face_period must be >= 1");
    if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
        throw ValidationError("policy.confidence_threshold out of range");
    }
    if (!(match_threshold >= 0.0 && match_threshold <= 1.0)) {
        throw ValidationError("policy.match_threshold out of range");
    }
    if (mode == PolicyMode::Adaptive && face_trigger_class.empty()) {
        throw ValidationError("policy.face_trigger_class must not be empty");
    }
}

ExecutionPlan plan_frame(std::uint64_t frame_index, std::span<const Detection> filtered_detections,
                         const GatingPolicy& policy) {
    ExecutionPlan plan;
    plan.run_detect = true;
    if (policy.mode == PolicyMode::Baseline) {
        plan.run_face = true;
    } else {
        plan.run_face = frame_index % policy.face_period == 0 &&
                        contains_class(filtered_detections, policy.face_trigger_class);
    }
    return plan;
}

std::vector<std::size_t> emotion_targets(const ExecutionPlan& plan,
                                         std::span<const MatchResult> matches,
                                         const GatingPolicy& policy) {
    std::vector<std::size_t> targets;
    if (!plan.run_face) return targets;
    const bool owner_only = policy.effective_emotion_scope() == EmotionScope::OwnerOnly;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (!owner_only || matches[i].is_owner) targets.push_back(i);
    }
    return targets;
}

std::vector<Detection> detect_frame(const FrameTruth& frame, const PipelineContext& ctx) {
    SplitMix64 rng = detect_stream(ctx.noise, frame.index);
    const auto raw = mock_detect(frame, ctx.noise, rng);
    return filter_by_confidence(raw, ctx.policy.confidence_threshold);
}

FrameResult execute_frame(const FrameTruth& frame, std::vector<Detection> filtered,
                          ExecutionPlan plan, const PipelineContext& ctx) {
    FrameResult result;
    result.frame_index = frame.index;
    result.costs.overhead_ms = ctx.cost_model.overhead_ms;
    result.costs.detect_ms = stage_cost(Stage::Detect, ctx.cost_model);

    for (const auto& d : filtered) {
        result.annotations.push_back({AnnotationKind::ObjectBox, d.class_label, d.box});
    }
    result.detections = std::move(filtered);

    if (plan.run_face) {
        if (ctx.database == nullptr) {
            throw ConfigError("database_path: face stage requires an owner database");
        }
        if (ctx.prototypes == nullptr) {
            throw ConfigError("face stage requires identity prototypes");
        }
        result.costs.face_ms = stage_cost(Stage::Face, ctx.cost_model);

        for (std::size_t i = 0; i < frame.faces.size(); ++i) {
            const GroundFace& face = frame.faces[i];
            SplitMix64 rng = embed_stream(ctx.noise, frame.index, i);
            const EmbeddingVector probe = mock_embed(face, *ctx.prototypes, ctx.noise, rng);
            MatchResult m = match(*ctx.database, probe, ctx.policy.match_threshold);
            result.annotations.push_back(m.is_owner
                                             ? AnnotationEvent{AnnotationKind::OwnerGreen, "Owner", face.box}
                                             : AnnotationEvent{AnnotationKind::UnknownRed, "Unknown", face.box});
            result.matches.push_back(std::move(m));
        }

        plan.run_emotion_for = emotion_targets(plan, result.matches, ctx.policy);
        for (std::size_t ordinal : plan.run_emotion_for) {
            const GroundFace& face = frame.faces[ordinal];
            SplitMix64 rng = emotion_stream(ctx.noise, frame.index, ordinal);
            EmotionScores scores = mock_emotion(face, ctx.noise, rng);
            result.annotations.push_back({AnnotationKind::EmotionLabel,
                                          std::string(to_string(scores.dominant())), face.box});
            result.emotions.push_back({ordinal, scores});
            result.costs.emotion_ms += stage_cost(Stage::Emotion, ctx.cost_model);
        }
    }

    result.plan = std::move(plan);
    result.cost_ms = result.costs.total_ms();
    return result;
}

FrameResult process_frame(const FrameTruth& frame, const PipelineContext& ctx) {
    auto filtered = detect_frame(frame, ctx);
    ExecutionPlan plan = plan_frame(frame.index, filtered, ctx.policy);
    return execute_frame(frame, std::move(filtered), std::move(plan), ctx);
}

std::vector<FrameResult> run_pipeline(const ScenarioTrace& trace, const PipelineContext& ctx) {
    ctx.policy.validate();
    ctx.cost_model.validate();
    ctx.noise.validate();
    if (auto v = validate_trace(trace); !v.ok()) {
        throw ValidationError("invalid trace: " + v.summary());
    }

    std::vector<FrameResult> results;
    results.reserve(trace.frames.size());
    for (const auto& frame : trace.frames) {
        try {
            results.push_back(process_frame(frame, ctx));
        } catch (const ConfigError& e) {
            throw ConfigError("frame " + std::to_string(frame.index) + ": " + e.what());
        } catch (const Error& e) {
            throw PipelineError(frame.index, e.what());
        }
    }
    return results;
}

}  // namespace gatesim
