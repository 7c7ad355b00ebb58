#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gatesim/core.hpp"
#include "gatesim/embedding_store.hpp"
#include "gatesim/rng.hpp"

namespace gatesim {

enum class Stage : std::uint8_t { Detect, Face, Emotion };

std::string_view to_string(Stage stage);
// Throws ValidationError("unknown stage id '<name>'").
Stage parse_stage(std::string_view name);

struct StageCostModel {
    double detect_ms = 40.0;
    double face_ms = 120.0;
    double emotion_ms = 80.0;
    double overhead_ms = 0.0;

    void validate() const;
};

double stage_cost(Stage stage, const StageCostModel& model);

struct NoiseConfig {
    // Expected Euclidean norm of the noise added to a unit prototype.
    double embedding_sigma = 0.1;
    double emotion_accuracy = 0.75;
    double confidence_jitter = 0.05;
    std::uint64_t seed = 42;

    void validate() const;
};

/// Deterministic unit-norm prototypes standing in for a face-embedding space.
///
/// Identities are registered in priority order. Each identity's prototype is
/// the first candidate (drawn from a stream keyed by seed, tag hash and
/// attempt number) whose cosine similarity with every higher-priority
/// prototype is below kMaxPrototypeSimilarity. Unregistered tags are resolved
/// the same way against all registered prototypes, so the enrolled identity
/// keeps the same prototype regardless of which intruders appear later.
class IdentityPrototypes {
public:
    static constexpr double kMaxPrototypeSimilarity = 0.2;

    IdentityPrototypes(std::uint64_t seed, const std::vector<std::string>& identities);

    EmbeddingVector prototype_for(std::string_view identity) const;
    const std::map<std::string, EmbeddingVector, std::less<>>& registered() const {
        return prototypes_;
    }
    std::uint64_t seed() const { return seed_; }

private:
    EmbeddingVector derive(std::string_view identity) const;

    std::uint64_t seed_;
    std::vector<EmbeddingVector> ordered_;
    std::map<std::string, EmbeddingVector, std::less<>> prototypes_;
};

// Keyed streams for the three stages: (seed, frame index, ordinal, stage).
SplitMix64 detect_stream(const NoiseConfig& noise, std::uint64_t frame_index);
SplitMix64 embed_stream(const NoiseConfig& noise, std::uint64_t frame_index,
                        std::uint64_t face_ordinal);
SplitMix64 emotion_stream(const NoiseConfig& noise, std::uint64_t frame_index,
                          std::uint64_t face_ordinal);

// Unit-normalized prototype + isotropic gaussian noise of expected norm sigma.
// sigma == 0 returns the prototype unchanged.
EmbeddingVector perturb_embedding(const EmbeddingVector& prototype, double sigma,
                                  SplitMix64& rng);

std::vector<Detection> mock_detect(const FrameTruth& frame, const NoiseConfig& noise,
                                   SplitMix64& rng);

EmbeddingVector mock_embed(const GroundFace& face, const IdentityPrototypes& prototypes,
                           const NoiseConfig& noise, SplitMix64& rng);

EmotionScores mock_emotion(const GroundFace& face, const NoiseConfig& noise, SplitMix64& rng);

}  // namespace gatesim
