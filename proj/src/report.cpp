#include "gatesim/report.hpp"

#include <cstdio>
#include <memory>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

constexpr int kReportFormatVersion = 1;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json scores_to_json(const EmotionScores& s) {
    Json j = Json::object();
    for (Emotion e : kAllEmotions) j[std::string(to_string(e))] = s[e];
    return j;
}

Json policy_to_json(const GatingPolicy& p) {
    return {{"mode", std::string(to_string(p.mode))},
            {"face_period", p.face_period},
            {"face_trigger_class", p.face_trigger_class},
            {"emotion_scope", std::string(to_string(p.effective_emotion_scope()))},
            {"confidence_threshold", p.confidence_threshold},
            {"match_threshold", p.match_threshold}};
}

Json cost_model_to_json(const StageCostModel& c) {
    return {{"detect_ms", c.detect_ms},
            {"face_ms", c.face_ms},
            {"emotion_ms", c.emotion_ms},
            {"overhead_ms", c.overhead_ms}};
}

Json noise_to_json(const NoiseConfig& n) {
    return {{"embedding_sigma", n.embedding_sigma},
            {"emotion_accuracy", n.emotion_accuracy},
            {"confidence_jitter", n.confidence_jitter},
            {"seed", n.seed}};
}

Json frame_to_json(const FrameResult& r) {
    Json stages = Json::array();
    if (r.plan.run_detect) stages.push_back("detect");
    if (r.plan.run_face) stages.push_back("face");
    if (!r.emotions.empty()) stages.push_back("emotion");

    Json detections = Json::array();
    for (const auto& d : r.detections) {
        detections.push_back(
            {{"class", d.class_label}, {"confidence", d.confidence}, {"box", box_to_json(d.box)}});
    }
    Json matches = Json::array();
    for (std::size_t i = 0; i < r.matches.size(); ++i) {
        const auto& m = r.matches[i];
        matches.push_back({{"face", i},
                           {"similarity", m.similarity},
                           {"is_owner", m.is_owner},
                           {"identity", m.matched_identity ? Json(*m.matched_identity) : Json(nullptr)}});
    }
    Json emotions = Json::array();
    for (const auto& e : r.emotions) {
        emotions.push_back({{"face", e.face_ordinal},
                            {"dominant", std::string(to_string(e.scores.dominant()))},
                            {"confidence", e.scores.dominant_score()}});
    }
    Json annotations = Json::array();
    for (const auto& a : r.annotations) {
        annotations.push_back(
            {{"kind", std::string(to_string(a.kind))}, {"label", a.label}, {"box", box_to_json(a.box)}});
    }
    return {{"index", r.frame_index},
            {"stages_run", stages},
            {"cost",
             {{"overhead_ms", r.costs.overhead_ms},
              {"detect_ms", r.costs.detect_ms},
              {"face_ms", r.costs.face_ms},
              {"emotion_ms", r.costs.emotion_ms},
              {"total_ms", r.cost_ms}}},
            {"detections", detections},
            {"matches", matches},
            {"emotions", emotions},
            {"annotations", annotations}};
}

Json outcome_to_json(const ClassificationOutcome& o) {
    return {{"frame", o.frame_index},
            {"face", o.face_ordinal},
            {"identity", o.identity},
            {"truth_owner", o.truth_owner},
            {"similarity", o.similarity},
            {"predicted_owner", o.predicted_owner},
            {"true_emotion", std::string(to_string(o.true_emotion))},
            {"emotion_scores", o.emotion ? scores_to_json(*o.emotion) : Json(nullptr)}};
}

const Json& required(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
    return *it;
}

template <typename T>
T typed(const Json& j, const std::string& where, bool ok) {
    if (!ok) throw ParseError(where + ": unexpected type");
    return j.get<T>();
}

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

OutcomeMetrics evaluate_outcomes(std::span<const ClassificationOutcome> outcomes,
                                 std::size_t window) {
    OutcomeMetrics m;
    m.window = window;

    if (!outcomes.empty()) {
        const std::size_t n = outcomes.size();
        auto preds = std::make_unique<bool[]>(n);
        auto truths = std::make_unique<bool[]>(n);
        std::vector<ScoredSample> scored;
        scored.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = outcomes[i].predicted_owner;
            truths[i] = outcomes[i].truth_owner;
            scored.push_back({outcomes[i].similarity, outcomes[i].truth_owner});
        }
        m.match_confusion = confusion_matrix({preds.get(), n}, {truths.get(), n});
        const bool any_pos = m.match_confusion->tp + m.match_confusion->fn > 0;
        const bool any_neg = m.match_confusion->tn + m.match_confusion->fp > 0;
        if (any_pos && any_neg) m.match_auc = auc(scored);
        if (any_pos) m.match_ap = average_precision(scored);
    }

    std::vector<EmotionSample> samples;
    std::vector<EmotionEvent> events;
    for (const auto& o : outcomes) {
        if (!o.emotion) continue;
        samples.emplace_back(*o.emotion, o.true_emotion);
        events.push_back({o.frame_index, o.emotion->dominant() == o.true_emotion});
    }
    m.emotion_samples = samples.size();
    m.emotion_accuracy = dominant_accuracy(samples);
    m.per_class = one_vs_rest_metrics(samples);
    m.windowed_accuracy = accuracy_over_time(events, window);
    return m;
}

Json metrics_to_json(const OutcomeMetrics& m) {
    Json match = Json::object();
    if (m.match_confusion) {
        const auto& c = *m.match_confusion;
        match["confusion"] = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
        match["accuracy"] = c.accuracy();
    } else {
        match["confusion"] = nullptr;
        match["accuracy"] = nullptr;
    }
    match["auc"] = optional_number(m.match_auc);
    match["ap"] = optional_number(m.match_ap);

    Json per_class = Json::object();
    for (Emotion e : kAllEmotions) {
        const auto& c = m.per_class[index_of(e)];
        per_class[std::string(to_string(e))] = {{"auc", optional_number(c.auc)},
                                                {"ap", optional_number(c.ap)}};
    }
    Json series = Json::array();
    for (const auto& p : m.windowed_accuracy) series.push_back(Json::array({p.frame_index, p.accuracy}));

    return {{"ap_definition", "mean precision at each positive rank, not interpolated"},
            {"match", match},
            {"emotion",
             {{"samples", m.emotion_samples},
              {"accuracy", m.emotion_samples ? Json(m.emotion_accuracy) : Json(nullptr)},
              {"per_class", per_class},
              {"window", m.window},
              {"windowed_accuracy", series}}}};
}

Json simulation_report_to_json(const SimulationReport& r, std::size_t window) {
    Json outcomes = Json::array();
    for (const auto& o : r.outcomes) outcomes.push_back(outcome_to_json(o));
    Json log = Json::array();
    for (const auto& f : r.frame_log) log.push_back(frame_to_json(f));

    return {{"report_type", "simulation"},
            {"format_version", kReportFormatVersion},
            {"policy", policy_to_json(r.policy)},
            {"cost_model", cost_model_to_json(r.cost_model)},
            {"noise", noise_to_json(r.noise)},
            {"database_identity", r.database_identity},
            {"trace_hash", hex64(r.trace_hash)},
            {"frames", r.frames},
            {"total_time_ms", r.total_time_ms},
            {"module_time_ms", r.module_time_ms},
            {"average_fps", r.average_fps},
            {"avg_cost_per_frame_ms", r.avg_cost_per_frame_ms},
            {"invocations",
             {{"detect", r.invocations.detect},
              {"face", r.invocations.face},
              {"match", r.invocations.match},
              {"emotion", r.invocations.emotion}}},
            {"peak_concurrent_stages", r.peak_concurrent_stages},
            {"proxies",
             {{"cpu_busy_pct", r.cpu_busy_proxy_pct},
              {"memory_mb", r.memory_proxy_mb},
              {"note",
               "proxies, not measurements: cpu_busy_pct is module time relative to one pass of "
               "every stage per frame; memory_mb sums configured footprints of invoked stages"}}},
            {"metrics", metrics_to_json(evaluate_outcomes(r.outcomes, window))},
            {"outcomes", outcomes},
            {"frame_log", log}};
}

Json comparison_report_to_json(const ComparisonReport& c, std::size_t window) {
    const auto& b = c.baseline;
    const auto& a = c.adaptive;
    const auto& cal = c.calibration;
    return {
        {"report_type", "comparison"},
        {"format_version", kReportFormatVersion},
        {"trace_hash", hex64(a.trace_hash)},
        {"same_trace", a.trace_hash == b.trace_hash && a.noise.seed == b.noise.seed},
        {"fps_ratio", c.fps_ratio},
        {"time_per_frame_reduction_pct", c.time_per_frame_reduction_pct},
        {"module_compute_reduction_pct", c.module_compute_reduction_pct},
        {"table",
         {{"average_fps", {{"baseline", b.average_fps}, {"adaptive", a.average_fps}, {"ratio", c.fps_ratio}}},
          {"cpu_busy_proxy_pct",
           {{"baseline", b.cpu_busy_proxy_pct},
            {"adaptive", a.cpu_busy_proxy_pct},
            {"reduction_pct", c.cpu_proxy_reduction_pct}}},
          {"memory_proxy_mb",
           {{"baseline", b.memory_proxy_mb},
            {"adaptive", a.memory_proxy_mb},
            {"reduction_pct", c.memory_proxy_reduction_pct}}},
          {"processing_time_per_frame_ms",
           {{"baseline", b.avg_cost_per_frame_ms},
            {"adaptive", a.avg_cost_per_frame_ms},
            {"reduction_pct", c.time_per_frame_reduction_pct}}}}},
        {"overhead_calibration",
         {{"reference_baseline_ms_per_frame", OverheadCalibration::kReferenceBaselineMsPerFrame},
          {"reference_adaptive_ms_per_frame", OverheadCalibration::kReferenceAdaptiveMsPerFrame},
          {"overhead_matching_baseline_ms", cal.overhead_matching_baseline_ms},
          {"overhead_matching_adaptive_ms", cal.overhead_matching_adaptive_ms},
          {"single_overhead_matches_both", cal.single_overhead_matches_both},
          {"note", cal.single_overhead_matches_both
                       ? "one fixed per-frame overhead reproduces both reference rows"
                       : "no single fixed per-frame overhead reproduces both reference rows; "
                         "each row needs the overhead listed for it"}}},
        {"baseline", simulation_report_to_json(b, window)},
        {"adaptive", simulation_report_to_json(a, window)}};
}

std::string dump_report(const Json& doc) { return doc.dump(1) + "\n"; }

std::vector<ClassificationOutcome> outcomes_from_json(const Json& doc, const std::string& where) {
    const Json& arr = required(doc, "outcomes", where);
    if (!arr.is_array()) throw ParseError(where + ".outcomes: expected an array");
    std::vector<ClassificationOutcome> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = where + ".outcomes[" + std::to_string(i) + "]";
        const Json& j = arr[i];
        ClassificationOutcome o;
        const Json& frame = required(j, "frame", w);
        o.frame_index = typed<std::uint64_t>(frame, w + ".frame", frame.is_number_unsigned());
        const Json& face = required(j, "face", w);
        o.face_ordinal = typed<std::size_t>(face, w + ".face", face.is_number_unsigned());
        const Json& id = required(j, "identity", w);
        o.identity = typed<std::string>(id, w + ".identity", id.is_string());
        const Json& to = required(j, "truth_owner", w);
        o.truth_owner = typed<bool>(to, w + ".truth_owner", to.is_boolean());
        const Json& sim = required(j, "similarity", w);
        o.similarity = typed<double>(sim, w + ".similarity", sim.is_number());
        const Json& po = required(j, "predicted_owner", w);
        o.predicted_owner = typed<bool>(po, w + ".predicted_owner", po.is_boolean());
        const Json& te = required(j, "true_emotion", w);
        const auto emotion_name = typed<std::string>(te, w + ".true_emotion", te.is_string());
        auto parsed = parse_emotion(emotion_name);
        if (!parsed) throw ParseError(w + ".true_emotion: unknown emotion '" + emotion_name + "'");
        o.true_emotion = *parsed;

        const Json& scores = required(j, "emotion_scores", w);
        if (!scores.is_null()) {
            EmotionScores::Array values{};
            for (Emotion e : kAllEmotions) {
                const std::string key(to_string(e));
                const Json& v = required(scores, key.c_str(), w + ".emotion_scores");
                values[index_of(e)] =
                    typed<double>(v, w + ".emotion_scores." + key, v.is_number());
            }
            try {
                o.emotion = EmotionScores(values);
            } catch (const ValidationError& e) {
                throw ParseError(w + ".emotion_scores: " + e.what());
            }
        }
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace gatesim
