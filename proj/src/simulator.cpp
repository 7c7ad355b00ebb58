#include "gatesim/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

#include "gatesim/errors.hpp"
#include "gatesim/rng.hpp"

namespace gatesim {

namespace {

constexpr double kDistributionTolerance = 1e-9;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

Box random_box(SplitMix64& rng, double min_w, double max_w, double min_h, double max_h) {
    Box b;
    b.w = rng.uniform(min_w, max_w);
    b.h = rng.uniform(min_h, max_h);
    b.x = rng.uniform(0.0, kCanvasWidth - b.w);
    b.y = rng.uniform(0.0, kCanvasHeight - b.h);
    return b;
}

Emotion sample_emotion(SplitMix64& rng, const std::array<double, kEmotionCount>& dist) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        acc += dist[i];
        if (u < acc) return kAllEmotions[i];
    }
    // u fell in the rounding gap above the cumulative sum; take the last
    // label with nonzero mass.
    for (std::size_t i = kEmotionCount; i-- > 0;) {
        if (dist[i] > 0.0) return kAllEmotions[i];
    }
    return Emotion::Neutral;
}

class Fingerprint {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= c[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double d) { u64(std::bit_cast<std::uint64_t>(d)); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void box(const Box& b) {
        f64(b.x);
        f64(b.y);
        f64(b.w);
        f64(b.h);
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

double pct_reduction(double before, double after) {
    return before > 0.0 ? 100.0 * (1.0 - after / before) : 0.0;
}

}  // namespace

std::vector<std::string> ScenarioSpec::violations() const {
    std::vector<std::string> out;
    if (frame_count == 0) out.emplace_back("frame_count must be positive");
    if (!in_unit_interval(person_presence_rate)) out.emplace_back("person_presence_rate out of range");
    if (!in_unit_interval(owner_fraction)) out.emplace_back("owner_fraction out of range");
    if (owner_identity.empty()) out.emplace_back("owner_identity must not be empty");

    double sum = 0.0;
    bool negative = false;
    for (double p : emotion_distribution) {
        negative = negative || !(p >= 0.0);
        sum += p;
    }
    if (negative || std::abs(sum - 1.0) > kDistributionTolerance) {
        out.emplace_back("emotion_distribution must be non-negative and sum to 1");
    }

    for (const auto& name : intruder_names) {
        if (name.empty()) out.emplace_back("intruder_names entries must not be empty");
        if (name == owner_identity) out.emplace_back("intruder name '" + name + "' equals owner_identity");
    }
    if (intruder_names.empty() && owner_fraction < 1.0 && person_presence_rate > 0.0) {
        out.emplace_back("intruder_names must not be empty when owner_fraction < 1");
    }

    for (const auto& [cls, rate] : extra_object_classes) {
        if (!is_known_class(cls)) out.emplace_back("extra_object_classes: unknown class '" + cls + "'");
        if (!in_unit_interval(rate)) out.emplace_back("extra_object_classes: rate for '" + cls + "' out of range");
    }
    return out;
}

void ScenarioSpec::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    for (std::size_t i = 0; i < v.size(); ++i) msg << (i ? "; " : "") << v[i];
    throw ValidationError(msg.str());
}

ScenarioTrace generate_trace(const ScenarioSpec& spec) {
    spec.validate();
    ScenarioTrace trace;
    trace.seed = spec.seed;
    trace.frames.reserve(spec.frame_count);

    for (std::uint64_t i = 0; i < spec.frame_count; ++i) {
        SplitMix64 rng = keyed_stream(spec.seed, i, 0, StreamId::Scenario);
        FrameTruth frame;
        frame.index = i;

        if (rng.uniform() < spec.person_presence_rate) {
            GroundObject person;
            person.class_label = std::string(kPersonClass);
            person.box = random_box(rng, 120.0, 260.0, 240.0, 420.0);
            // Floor of 0.6 keeps persons above the default 0.5 cut under default jitter.
            person.base_confidence = rng.uniform(0.6, 0.95);

            GroundFace face;
            face.box = {person.box.x + 0.3 * person.box.w, person.box.y + 0.05 * person.box.h,
                        0.4 * person.box.w, 0.25 * person.box.h};
            if (rng.uniform() < spec.owner_fraction || spec.intruder_names.empty()) {
                face.identity = spec.owner_identity;
            } else {
                face.identity = spec.intruder_names[rng.below(spec.intruder_names.size())];
            }
            face.true_emotion = sample_emotion(rng, spec.emotion_distribution);

            frame.objects.push_back(std::move(person));
            frame.faces.push_back(std::move(face));
        }

        for (const auto& [cls, rate] : spec.extra_object_classes) {
            if (rng.uniform() < rate) {
                GroundObject obj;
                obj.class_label = cls;
                obj.box = random_box(rng, 20.0, 160.0, 20.0, 160.0);
                obj.base_confidence = rng.uniform(0.3, 0.95);
                frame.objects.push_back(std::move(obj));
            }
        }
        trace.frames.push_back(std::move(frame));
    }
    return trace;
}

OwnerDatabase synthesize_owner_database(const std::string& identity, std::uint64_t count,
                                        double sigma, std::uint64_t seed,
                                        std::int64_t created_at) {
    if (count == 0) throw ValidationError("enrollment requires at least one embedding");
    if (!(sigma >= 0.0)) throw ValidationError("enrollment sigma must be >= 0");
    const IdentityPrototypes prototypes(seed, {identity});
    const EmbeddingVector prototype = prototypes.prototype_for(identity);
    std::vector<EmbeddingVector> samples;
    samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        SplitMix64 rng = keyed_stream(seed, i, 0, StreamId::Enroll);
        samples.push_back(perturb_embedding(prototype, sigma, rng));
    }
    return enroll(identity, samples, created_at);
}

std::uint64_t trace_fingerprint(const ScenarioTrace& trace) {
    Fingerprint fp;
    fp.u64(trace.version);
    fp.u64(trace.seed);
    fp.u64(trace.frames.size());
    for (const auto& f : trace.frames) {
        fp.u64(f.index);
        fp.u64(f.objects.size());
        for (const auto& o : f.objects) {
            fp.str(o.class_label);
            fp.f64(o.base_confidence);
            fp.box(o.box);
        }
        fp.u64(f.faces.size());
        for (const auto& face : f.faces) {
            fp.str(face.identity);
            fp.u64(index_of(face.true_emotion));
            fp.box(face.box);
        }
    }
    return fp.value();
}

SimulationReport run_simulation(const ScenarioTrace& trace, const GatingPolicy& policy,
                                const OwnerDatabase* db, const StageCostModel& cost_model,
                                const NoiseConfig& noise, const MemoryFootprint& footprint) {
    // The enrolled identity goes first so it keeps the prototype it was enrolled with.
    std::vector<std::string> identities;
    if (db != nullptr) identities.push_back(db->identity());
    std::set<std::string> seen;
    for (const auto& f : trace.frames) {
        for (const auto& face : f.faces) seen.insert(face.identity);
    }
    identities.insert(identities.end(), seen.begin(), seen.end());
    const IdentityPrototypes prototypes(noise.seed, identities);

    PipelineContext ctx{policy, cost_model, noise, db, &prototypes};

    SimulationReport report;
    report.policy = policy;
    report.cost_model = cost_model;
    report.noise = noise;
    report.database_identity = db != nullptr ? db->identity() : std::string();
    report.trace_hash = trace_fingerprint(trace);
    report.frame_log = run_pipeline(trace, ctx);
    report.frames = report.frame_log.size();

    for (const auto& r : report.frame_log) {
        report.total_time_ms += r.cost_ms;
        report.module_time_ms += r.costs.module_ms();
        report.invocations.detect += r.plan.run_detect ? 1 : 0;
        report.invocations.face += r.plan.run_face ? 1 : 0;
        report.invocations.match += r.matches.size();
        report.invocations.emotion += r.emotions.size();
        const std::uint32_t stages = (r.plan.run_detect ? 1u : 0u) + (r.plan.run_face ? 1u : 0u) +
                                     (r.emotions.empty() ? 0u : 1u);
        report.peak_concurrent_stages = std::max(report.peak_concurrent_stages, stages);

        const FrameTruth& truth = trace.frames[r.frame_index];
        for (std::size_t i = 0; i < r.matches.size(); ++i) {
            ClassificationOutcome o;
            o.frame_index = r.frame_index;
            o.face_ordinal = i;
            o.identity = truth.faces[i].identity;
            o.truth_owner = db != nullptr && o.identity == db->identity();
            o.similarity = r.matches[i].similarity;
            o.predicted_owner = r.matches[i].is_owner;
            o.true_emotion = truth.faces[i].true_emotion;
            for (const auto& fe : r.emotions) {
                if (fe.face_ordinal == i) o.emotion = fe.scores;
            }
            report.outcomes.push_back(std::move(o));
        }
    }

    if (report.total_time_ms > 0.0) {
        report.average_fps = 1000.0 * static_cast<double>(report.frames) / report.total_time_ms;
    }
    if (report.frames > 0) {
        const double frames = static_cast<double>(report.frames);
        report.avg_cost_per_frame_ms = report.total_time_ms / frames;
        const double full_pass = cost_model.detect_ms + cost_model.face_ms + cost_model.emotion_ms;
        if (full_pass > 0.0) {
            report.cpu_busy_proxy_pct = 100.0 * report.module_time_ms / (frames * full_pass);
        }
    }
    report.memory_proxy_mb = footprint.base_mb +
                             (report.invocations.detect ? footprint.detect_mb : 0.0) +
                             (report.invocations.face ? footprint.face_mb : 0.0) +
                             (report.invocations.emotion ? footprint.emotion_mb : 0.0);
    return report;
}

OverheadCalibration calibrate_overhead(const SimulationReport& baseline,
                                       const SimulationReport& adaptive) {
    OverheadCalibration c;
    auto module_per_frame = [](const SimulationReport& r) {
        return r.frames ? r.module_time_ms / static_cast<double>(r.frames) : 0.0;
    };
    c.overhead_matching_baseline_ms =
        OverheadCalibration::kReferenceBaselineMsPerFrame - module_per_frame(baseline);
    c.overhead_matching_adaptive_ms =
        OverheadCalibration::kReferenceAdaptiveMsPerFrame - module_per_frame(adaptive);
    c.single_overhead_matches_both =
        std::abs(c.overhead_matching_baseline_ms - c.overhead_matching_adaptive_ms) < 1e-9;
    return c;
}

ComparisonReport compare(const ScenarioTrace& trace, const OwnerDatabase* db,
                         const StageCostModel& cost_model, const NoiseConfig& noise,
                         const GatingPolicy& adaptive_policy, const MemoryFootprint& footprint) {
    if (adaptive_policy.mode != PolicyMode::Adaptive) {
        throw ValidationError("compare expects an adaptive policy");
    }
    GatingPolicy baseline_policy = adaptive_policy;
    baseline_policy.mode = PolicyMode::Baseline;
    baseline_policy.emotion_scope = EmotionScope::AllFaces;

    auto baseline_run = std::async(std::launch::async, [&] {
        return run_simulation(trace, baseline_policy, db, cost_model, noise, footprint);
    });
    SimulationReport adaptive = run_simulation(trace, adaptive_policy, db, cost_model, noise, footprint);

    ComparisonReport out;
    out.baseline = baseline_run.get();
    out.adaptive = std::move(adaptive);
    if (out.baseline.average_fps > 0.0) {
        out.fps_ratio = out.adaptive.average_fps / out.baseline.average_fps;
    }
    out.time_per_frame_reduction_pct =
        pct_reduction(out.baseline.avg_cost_per_frame_ms, out.adaptive.avg_cost_per_frame_ms);
    out.module_compute_reduction_pct =
        pct_reduction(out.baseline.module_time_ms, out.adaptive.module_time_ms);
    out.cpu_proxy_reduction_pct =
        pct_reduction(out.baseline.cpu_busy_proxy_pct, out.adaptive.cpu_busy_proxy_pct);
    out.memory_proxy_reduction_pct =
        pct_reduction(out.baseline.memory_proxy_mb, out.adaptive.memory_proxy_mb);
    out.calibration = calibrate_overhead(out.baseline, out.adaptive);
    return out;
}

}  // namespace gatesim
