#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatesim/metrics.hpp"
#include "gatesim/simulator.hpp"
#include "gatesim/trace_io.hpp"

namespace gatesim {

inline constexpr std::size_t kDefaultAccuracyWindow = 100;

// Metrics derived from the classification outcomes of one run.
struct OutcomeMetrics {
    // Owner matching: score = similarity, positive = ground-truth owner.
    std::optional<ConfusionMatrix> match_confusion;
    std::optional<double> match_auc;
    std::optional<double> match_ap;

    std::size_t emotion_samples = 0;
    double emotion_accuracy = 0.0;
    std::array<ClassMetrics, kEmotionCount> per_class{};
    std::size_t window = kDefaultAccuracyWindow;
    std::vector<WindowPoint> windowed_accuracy;
};

OutcomeMetrics evaluate_outcomes(std::span<const ClassificationOutcome> outcomes,
                                 std::size_t window = kDefaultAccuracyWindow);

/// Report documents. Key order is fixed, so identical inputs serialize to
/// identical bytes.
///
/// Simulation report keys: report_type, format_version, policy, cost_model,
/// noise, database_identity, trace_hash, frames, total_time_ms,
/// module_time_ms, average_fps, avg_cost_per_frame_ms, invocations,
/// peak_concurrent_stages, proxies, metrics, outcomes, frame_log.
Json simulation_report_to_json(const SimulationReport& report,
                               std::size_t window = kDefaultAccuracyWindow);
Json comparison_report_to_json(const ComparisonReport& report,
                               std::size_t window = kDefaultAccuracyWindow);
Json metrics_to_json(const OutcomeMetrics& metrics);

std::string dump_report(const Json& doc);

// Reads the outcomes array of a simulation report document.
// Throws ParseError naming the offending path.
std::vector<ClassificationOutcome> outcomes_from_json(const Json& simulation_report,
                                                      const std::string& where = "report");

std::string hex64(std::uint64_t v);

}  // namespace gatesim
