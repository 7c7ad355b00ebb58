#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gatesim/core.hpp"
#include "gatesim/embedding_store.hpp"
#include "gatesim/scheduler.hpp"
#include "gatesim/stages.hpp"

namespace gatesim {

struct ScenarioSpec {
    std::uint64_t frame_count = 1000;
    double person_presence_rate = 0.6;
    // Share of person-frames whose face is the owner; the rest are intruders.
    double owner_fraction = 0.7;
    std::string owner_identity = "owner";
    std::vector<std::string> intruder_names = {"intruder"};
    std::array<double, kEmotionCount> emotion_distribution = {
        1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    std::vector<std::pair<std::string, double>> extra_object_classes = {{"chair", 0.3},
                                                                         {"cup", 0.2}};
    std::uint64_t seed = 42;

    // Every violated bound, one message each.
    std::vector<std::string> violations() const;
    // Throws ValidationError listing violations().
    void validate() const;
};

// One person with one face on person-frames; deterministic per seed.
ScenarioTrace generate_trace(const ScenarioSpec& spec);

// `count` noisy embeddings around the identity's prototype, enrolled. The
// prototype comes from IdentityPrototypes(seed, {identity}), the same one a
// simulation with that seed assigns the enrolled identity.
OwnerDatabase synthesize_owner_database(const std::string& identity, std::uint64_t count,
                                        double sigma, std::uint64_t seed,
                                        std::int64_t created_at = 0);

// Structural FNV-1a fingerprint of a trace.
std::uint64_t trace_fingerprint(const ScenarioTrace& trace);

struct StageInvocations {
    std::uint64_t detect = 0;
    std::uint64_t face = 0;   // frames on which the face stage ran
    std::uint64_t match = 0;  // individual faces matched
    std::uint64_t emotion = 0;

    bool operator==(const StageInvocations&) const = default;
};

// Resident-memory constants used for the memory proxy. Not measured.
struct MemoryFootprint {
    double base_mb = 300.0;
    double detect_mb = 60.0;
    double face_mb = 100.0;
    double emotion_mb = 60.0;
};

// A matched face joined with its ground truth.
struct ClassificationOutcome {
    std::uint64_t frame_index = 0;
    std::size_t face_ordinal = 0;
    std::string identity;
    bool truth_owner = false;
    double similarity = 0.0;
    bool predicted_owner = false;
    Emotion true_emotion = Emotion::Neutral;
    std::optional<EmotionScores> emotion;
};

struct SimulationReport {
    GatingPolicy policy;
    StageCostModel cost_model;
    NoiseConfig noise;
    std::string database_identity;
    std::uint64_t trace_hash = 0;

    std::uint64_t frames = 0;
    double total_time_ms = 0.0;
    double module_time_ms = 0.0;
    double average_fps = 0.0;
    double avg_cost_per_frame_ms = 0.0;
    StageInvocations invocations;
    std::uint32_t peak_concurrent_stages = 0;

    // Proxies, not measurements: module time relative to one pass of every
    // stage per frame, and the footprint of every stage invoked at least once.
    double cpu_busy_proxy_pct = 0.0;
    double memory_proxy_mb = 0.0;

    std::vector<FrameResult> frame_log;
    std::vector<ClassificationOutcome> outcomes;
};

// Per-frame costs are summed as simulated time; nothing sleeps.
SimulationReport run_simulation(const ScenarioTrace& trace, const GatingPolicy& policy,
                                const OwnerDatabase* db, const StageCostModel& cost_model,
                                const NoiseConfig& noise, const MemoryFootprint& footprint = {});

// Per-frame latencies observed on reference hardware for the two policies,
// and the fixed overhead each would need under the configured cost model.
struct OverheadCalibration {
    static constexpr double kReferenceBaselineMsPerFrame = 476.0;
    static constexpr double kReferenceAdaptiveMsPerFrame = 179.0;

    double overhead_matching_baseline_ms = 0.0;
    double overhead_matching_adaptive_ms = 0.0;
    bool single_overhead_matches_both = false;
};

struct ComparisonReport {
    SimulationReport baseline;
    SimulationReport adaptive;
    double fps_ratio = 0.0;
    double time_per_frame_reduction_pct = 0.0;
    // Excludes overhead.
    double module_compute_reduction_pct = 0.0;
    double cpu_proxy_reduction_pct = 0.0;
    double memory_proxy_reduction_pct = 0.0;
    OverheadCalibration calibration;
};

OverheadCalibration calibrate_overhead(const SimulationReport& baseline,
                                       const SimulationReport& adaptive);

// Runs the baseline and the given adaptive policy on the same trace and noise
// seed (concurrently) and derives the ratios from the two reports.
ComparisonReport compare(const ScenarioTrace& trace, const OwnerDatabase* db,
                         const StageCostModel& cost_model, const NoiseConfig& noise,
                         const GatingPolicy& adaptive_policy,
                         const MemoryFootprint& footprint = {});

}  // namespace gatesim
