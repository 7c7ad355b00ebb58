#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gatesim/core.hpp"

namespace gatesim {

struct ScoredSample {
    double score = 0.0;
    bool label = false;
};

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    // (tp + tn) / total; 0 for an empty matrix.
    double accuracy() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const CurvePoint&) const = default;
};

// Throws ValidationError on length mismatch or empty input.
ConfusionMatrix confusion_matrix(std::span<const bool> predictions, std::span<const bool> truths);

// (FPR, TPR) after each group of tied scores, sweeping thresholds from the
// highest score down. Starts at (0,0) and ends at (1,1).
// Throws ValidationError("ROC undefined") unless both classes are present.
std::vector<CurvePoint> roc_curve(std::span<const ScoredSample> samples);

// Trapezoidal area under roc_curve.
double auc(std::span<const ScoredSample> samples);

// Brute force over every positive/negative pair; ties count one half.
double auc_pairwise_oracle(std::span<const ScoredSample> samples);

// (recall, precision) at each rank of a stable descending sort by score.
// Throws ValidationError("AP undefined") when there are no positives.
std::vector<CurvePoint> pr_curve(std::span<const ScoredSample> samples);

// Mean precision at the rank of each positive (no interpolation).
double average_precision(std::span<const ScoredSample> samples);

struct ClassMetrics {
    std::optional<double> auc;
    std::optional<double> ap;
};

using EmotionSample = std::pair<EmotionScores, Emotion>;

// One-vs-rest per emotion class; metrics undefined for a class are left empty.
std::array<ClassMetrics, kEmotionCount> one_vs_rest_metrics(
    std::span<const EmotionSample> samples);

// Fraction of samples whose dominant emotion equals the truth; 0 when empty.
double dominant_accuracy(std::span<const EmotionSample> samples);

struct EmotionEvent {
    std::uint64_t frame_index = 0;
    bool correct = false;
};

struct WindowPoint {
    std::uint64_t frame_index = 0;  // frame of the newest event in the window
    double accuracy = 0.0;

    bool operator==(const WindowPoint&) const = default;
};

// Sliding accuracy over the last `window` classified faces, one point per
// event once the window is full. A window at least as long as the series
// yields one point over everything. Throws ValidationError if window == 0.
std::vector<WindowPoint> accuracy_over_time(std::span<const EmotionEvent> events,
                                            std::size_t window);

}  // namespace gatesim
