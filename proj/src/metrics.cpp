#include "gatesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

struct ClassCounts {
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
};

ClassCounts count_classes(std::span<const ScoredSample> samples) {
    ClassCounts c;
    for (const auto& s : samples) {
        if (!std::isfinite(s.score)) throw ValidationError("sample score must be finite");
        (s.label ? c.pos : c.neg) += 1;
    }
    return c;
}

std::vector<ScoredSample> sorted_descending(std::span<const ScoredSample> samples) {
    std::vector<ScoredSample> sorted(samples.begin(), samples.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredSample& a, const ScoredSample& b) { return a.score > b.score; });
    return sorted;
}

ClassCounts require_both_classes(std::span<const ScoredSample> samples) {
    const ClassCounts c = count_classes(samples);
    if (c.pos == 0 || c.neg == 0) throw ValidationError("ROC undefined");
    return c;
}

}  // namespace

double ConfusionMatrix::accuracy() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(std::span<const bool> predictions, std::span<const bool> truths) {
    if (predictions.size() != truths.size()) {
        throw ValidationError("predictions and truths differ in length");
    }
    if (predictions.empty()) throw ValidationError("confusion matrix needs at least one sample");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i]) {
            (truths[i] ? m.tp : m.fp) += 1;
        } else {
            (truths[i] ? m.fn : m.tn) += 1;
        }
    }
    return m;
}

std::vector<CurvePoint> roc_curve(std::span<const ScoredSample> samples) {
    const ClassCounts c = require_both_classes(samples);
    const auto sorted = sorted_descending(samples);
    const double P = static_cast<double>(c.pos);
    const double N = static_cast<double>(c.neg);

    std::vector<CurvePoint> points{{0.0, 0.0}};
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double threshold = sorted[i].score;
        for (; i < sorted.size() && sorted[i].score == threshold; ++i) {
            (sorted[i].label ? tp : fp) += 1;
        }
        points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P});
    }
    return points;
}

double auc(std::span<const ScoredSample> samples) {
    const auto curve = roc_curve(samples);
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].x - curve[i - 1].x) * (curve[i].y + curve[i - 1].y) * 0.5;
    }
    return area;
}

double auc_pairwise_oracle(std::span<const ScoredSample> samples) {
    const ClassCounts c = require_both_classes(samples);
    double wins = 0.0;
    for (const auto& p : samples) {
        if (!p.label) continue;
        for (const auto& n : samples) {
            if (n.label) continue;
            if (p.score > n.score) {
                wins += 1.0;
            } else if (p.score == n.score) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

std::vector<CurvePoint> pr_curve(std::span<const ScoredSample> samples) {
    const ClassCounts c = count_classes(samples);
    if (c.pos == 0) throw ValidationError("AP undefined");
    const auto sorted = sorted_descending(samples);
    std::vector<CurvePoint> points;
    points.reserve(sorted.size());
    std::uint64_t tp = 0;
    for (std::size_t rank = 1; rank <= sorted.size(); ++rank) {
        if (sorted[rank - 1].label) ++tp;
        points.push_back({static_cast<double>(tp) / static_cast<double>(c.pos),
                          static_cast<double>(tp) / static_cast<double>(rank)});
    }
    return points;
}

double average_precision(std::span<const ScoredSample> samples) {
    const ClassCounts c = count_classes(samples);
    if (c.pos == 0) throw ValidationError("AP undefined");
    const auto sorted = sorted_descending(samples);
    double sum = 0.0;
    std::uint64_t tp = 0;
    for (std::size_t rank = 1; rank <= sorted.size(); ++rank) {
        if (!sorted[rank - 1].label) continue;
        ++tp;
        sum += static_cast<double>(tp) / static_cast<double>(rank);
    }
    return sum / static_cast<double>(c.pos);
}

std::array<ClassMetrics, kEmotionCount> one_vs_rest_metrics(
    std::span<const EmotionSample> samples) {
    std::array<ClassMetrics, kEmotionCount> out;
    for (Emotion cls : kAllEmotions) {
        std::vector<ScoredSample> binary;
        binary.reserve(samples.size());
        for (const auto& [scores, truth] : samples) {
            binary.push_back({scores[cls], truth == cls});
        }
        const ClassCounts c = count_classes(binary);
        ClassMetrics& m = out[index_of(cls)];
        if (c.pos > 0 && c.neg > 0) m.auc = auc(binary);
        if (c.pos > 0) m.ap = average_precision(binary);
    }
    return out;
}

double dominant_accuracy(std::span<const EmotionSample> samples) {
    if (samples.empty()) return 0.0;
    const auto correct = std::count_if(samples.begin(), samples.end(), [](const EmotionSample& s) {
        return s.first.dominant() == s.second;
    });
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::vector<WindowPoint> accuracy_over_time(std::span<const EmotionEvent> events,
                                            std::size_t window) {
    if (window == 0) throw ValidationError("window must be >= 1");
    std::vector<WindowPoint> out;
    if (events.empty()) return out;

    const std::size_t w = std::min(window, events.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        correct += events[i].correct ? 1 : 0;
        if (i >= w) correct -= events[i - w].correct ? 1 : 0;
        if (i + 1 >= w) {
            out.push_back({events[i].frame_index,
                           static_cast<double>(correct) / static_cast<double>(w)});
        }
    }
    return out;
}

}  // namespace gatesim
