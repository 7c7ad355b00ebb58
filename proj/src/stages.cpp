#include "gatesim/stages.hpp"

#include <algorithm>
#include <cmath>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

constexpr int kMaxPrototypeAttempts = 10000;
constexpr double kDominantMassMin = 0.6;
constexpr double kDominantMassSpread = 0.3;

EmbeddingVector prototype_candidate(std::uint64_t seed, std::string_view identity,
                                    std::uint64_t attempt) {
    SplitMix64 rng = keyed_stream(seed, fnv1a64(identity), attempt, StreamId::Prototype);
    EmbeddingVector v;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) v[i] = rng.gaussian();
    return v.normalized();
}

bool well_separated(const EmbeddingVector& candidate, const std::vector<EmbeddingVector>& others) {
    return std::all_of(others.begin(), others.end(), [&](const EmbeddingVector& o) {
        return candidate.dot(o) < IdentityPrototypes::kMaxPrototypeSimilarity;
    });
}

}  // namespace

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Detect: return "detect";
        case Stage::Face: return "face";
        case Stage::Emotion: return "emotion";
    }
    throw ValidationError("unknown stage id " + std::to_string(static_cast<int>(stage)));
}

Stage parse_stage(std::string_view name) {
    if (name == "detect") return Stage::Detect;
    if (name == "face") return Stage::Face;
    if (name == "emotion") return Stage::Emotion;
    throw ValidationError("unknown stage id '" + std::string(name) + "'");
}

void StageCostModel::validate() const {
    auto check = [](double v, const char* field) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string("cost_model.") + field + " must be finite and >= 0");
        }
    };
    check(detect_ms, "detect_ms");
    check(face_ms, "face_ms");
    check(emotion_ms, "emotion_ms");
    check(overhead_ms, "overhead_ms");
}

double stage_cost(Stage stage, const StageCostModel& model) {
    switch (stage) {
        case Stage::Detect: return model.detect_ms;
        case Stage::Face: return model.face_ms;
        case Stage::Emotion: return model.emotion_ms;
    }
    throw ValidationError("unknown stage id " + std::to_string(static_cast<int>(stage)));
}

void NoiseConfig::validate() const {
    if (!(embedding_sigma >= 0.0) || !std::isfinite(embedding_sigma)) {
        throw ValidationError("noise.embedding_sigma must be finite and >= 0");
    }
    if (!(emotion_accuracy >= 0.0 && emotion_accuracy <= 1.0)) {
        throw ValidationError("noise.emotion_accuracy out of range");
    }
    if (!(confidence_jitter >= 0.0) || !std::isfinite(confidence_jitter)) {
        throw ValidationError("noise.confidence_jitter must be finite and >= 0");
    }
}

IdentityPrototypes::IdentityPrototypes(std::uint64_t seed,
                                       const std::vector<std::string>& identities)
    : seed_(seed) {
    for (const auto& id : identities) {
        if (prototypes_.contains(id)) continue;
        EmbeddingVector p = derive(id);
        ordered_.push_back(p);
        prototypes_.emplace(id, p);
    }
}

EmbeddingVector IdentityPrototypes::derive(std::string_view identity) const {
    for (int attempt = 0; attempt < kMaxPrototypeAttempts; ++attempt) {
        EmbeddingVector candidate = prototype_candidate(seed_, identity, attempt);
        if (well_separated(candidate, ordered_)) return candidate;
    }
    throw DomainError("cannot place a separated prototype for '" + std::string(identity) + "'");
}

EmbeddingVector IdentityPrototypes::prototype_for(std::string_view identity) const {
    if (auto it = prototypes_.find(identity); it != prototypes_.end()) return it->second;
    return derive(identity);
}

SplitMix64 detect_stream(const NoiseConfig& noise, std::uint64_t frame_index) {
    return keyed_stream(noise.seed, frame_index, 0, StreamId::Detect);
}

SplitMix64 embed_stream(const NoiseConfig& noise, std::uint64_t frame_index,
                        std::uint64_t face_ordinal) {
    return keyed_stream(noise.seed, frame_index, face_ordinal, StreamId::Embed);
}

SplitMix64 emotion_stream(const NoiseConfig& noise, std::uint64_t frame_index,
                          std::uint64_t face_ordinal) {
    return keyed_stream(noise.seed, frame_index, face_ordinal, StreamId::Emotion);
}

EmbeddingVector perturb_embedding(const EmbeddingVector& prototype, double sigma,
                                  SplitMix64& rng) {
    if (sigma == 0.0) return prototype;
    const double per_component = sigma / std::sqrt(static_cast<double>(kEmbeddingDim));
    EmbeddingVector v = prototype;
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) v[i] += per_component * rng.gaussian();
    return v.normalized();
}

std::vector<Detection> mock_detect(const FrameTruth& frame, const NoiseConfig& noise,
                                   SplitMix64& rng) {
    std::vector<Detection> out;
    out.reserve(frame.objects.size());
    const double j = noise.confidence_jitter;
    for (const auto& obj : frame.objects) {
        double confidence = obj.base_confidence;
        if (j > 0.0) confidence = std::clamp(confidence + rng.uniform(-j, j), 0.0, 1.0);
        out.push_back({obj.class_label, confidence, obj.box});
    }
    return out;
}

EmbeddingVector mock_embed(const GroundFace& face, const IdentityPrototypes& prototypes,
                           const NoiseConfig& noise, SplitMix64& rng) {
    return perturb_embedding(prototypes.prototype_for(face.identity), noise.embedding_sigma, rng);
}

EmotionScores mock_emotion(const GroundFace& face, const NoiseConfig& noise, SplitMix64& rng) {
    Emotion dominant = face.true_emotion;
    if (!(rng.uniform() < noise.emotion_accuracy)) {
        // Uniform over the five labels that differ from the truth.
        std::size_t pick = rng.below(kEmotionCount - 1);
        if (pick >= index_of(face.true_emotion)) ++pick;
        dominant = kAllEmotions[pick];
    }
    const double mass = kDominantMassMin + kDominantMassSpread * rng.uniform();
    const double rest = (1.0 - mass) / static_cast<double>(kEmotionCount - 1);
    EmotionScores::Array scores;
    scores.fill(rest);
    scores[index_of(dominant)] = mass;
    return EmotionScores(scores);
}

}  // namespace gatesim
