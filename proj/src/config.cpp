#include "gatesim/config.hpp"

#include <set>
#include <sstream>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

// Typed, strict view over one JSON object of the config.
class Section {
public:
    Section(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ParseError(path_ + ": expected an object");
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj_.items()) {
            if (!allowed.contains(k)) throw ValidationError(where(k) + ": unknown config key");
        }
    }

    bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    const Json& raw(const char* key) const { return obj_.at(key); }
    std::string where(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    double real(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const Json& j = obj_.at(key);
        if (!j.is_number()) throw ParseError(where(key) + ": expected a number");
        return j.get<double>();
    }
    std::uint64_t u64(const char* key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const Json& j = obj_.at(key);
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer()) throw ValidationError(where(key) + " must be non-negative");
        throw ParseError(where(key) + ": expected an integer");
    }
    std::string str(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const Json& j = obj_.at(key);
        if (!j.is_string()) throw ParseError(where(key) + ": expected a string");
        return j.get<std::string>();
    }
    Section child(const char* key) const { return Section(obj_.at(key), where(key)); }

private:
    const Json& obj_;
    std::string path_;
};

template <typename F>
auto rethrow_with_field(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(field + ": " + e.what());
    }
}

ScenarioSpec decode_scenario(const Section& s, std::uint64_t default_seed) {
    s.allow_only({"frame_count", "person_presence_rate", "owner_fraction", "owner_identity",
                  "intruder_names", "emotion_distribution", "extra_object_classes", "seed"});
    ScenarioSpec spec;
    spec.frame_count = s.u64("frame_count", spec.frame_count);
    spec.person_presence_rate = s.real("person_presence_rate", spec.person_presence_rate);
    spec.owner_fraction = s.real("owner_fraction", spec.owner_fraction);
    spec.owner_identity = s.str("owner_identity", spec.owner_identity);
    spec.seed = s.u64("seed", default_seed);

    if (s.has("intruder_names")) {
        const Json& names = s.raw("intruder_names");
        if (!names.is_array()) throw ParseError(s.where("intruder_names") + ": expected an array");
        spec.intruder_names.clear();
        for (const auto& n : names) {
            if (!n.is_string()) throw ParseError(s.where("intruder_names") + ": expected strings");
            spec.intruder_names.push_back(n.get<std::string>());
        }
    }
    if (s.has("emotion_distribution")) {
        const Section d = s.child("emotion_distribution");
        d.allow_only({"Angry", "Fear", "Happy", "Sad", "Surprise", "Neutral"});
        for (Emotion e : kAllEmotions) {
            const std::string key(to_string(e));
            if (!d.has(key.c_str())) throw ValidationError(d.where(key) + ": missing probability");
            spec.emotion_distribution[index_of(e)] = d.real(key.c_str(), 0.0);
        }
    }
    if (s.has("extra_object_classes")) {
        const Json& extra = s.raw("extra_object_classes");
        if (!extra.is_object()) {
            throw ParseError(s.where("extra_object_classes") + ": expected an object of class: rate");
        }
        spec.extra_object_classes.clear();
        for (const auto& [cls, rate] : extra.items()) {
            if (!rate.is_number()) throw ParseError(s.where("extra_object_classes." + cls) + ": expected a number");
            spec.extra_object_classes.emplace_back(cls, rate.get<double>());
        }
    }
    spec.validate();
    return spec;
}

Json* walk(Json& root, const std::string& dotted_key, std::string& leaf) {
    Json* node = &root;
    std::stringstream ss(dotted_key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty() || std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); })) {
        throw ValidationError("malformed override key '" + dotted_key + "'");
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        Json& next = (*node)[parts[i]];
        if (next.is_null()) next = Json::object();
        if (!next.is_object()) throw ValidationError("override '" + dotted_key + "' descends into a non-object");
        node = &next;
    }
    leaf = parts.back();
    return node;
}

}  // namespace

Json default_config_json() {
    const GatingPolicy p;
    const StageCostModel c;
    const NoiseConfig n;
    const EnrollSettings e;
    const MemoryFootprint m;
    return {{"seed", n.seed},
            {"policy",
             {{"mode", std::string(to_string(p.mode))},
              {"face_period", p.face_period},
              {"face_trigger_class", p.face_trigger_class},
              {"emotion_scope", std::string(to_string(p.emotion_scope))},
              {"confidence_threshold", p.confidence_threshold},
              {"match_threshold", p.match_threshold}}},
            {"cost_model",
             {{"detect_ms", c.detect_ms},
              {"face_ms", c.face_ms},
              {"emotion_ms", c.emotion_ms},
              {"overhead_ms", c.overhead_ms}}},
            {"noise",
             {{"embedding_sigma", n.embedding_sigma},
              {"emotion_accuracy", n.emotion_accuracy},
              {"confidence_jitter", n.confidence_jitter}}},
            {"enroll", {{"identity", e.identity}, {"count", e.count}, {"sigma", e.sigma}}},
            {"metrics", {{"window", kDefaultAccuracyWindow}}},
            {"memory_footprint",
             {{"base_mb", m.base_mb},
              {"detect_mb", m.detect_mb},
              {"face_mb", m.face_mb},
              {"emotion_mb", m.emotion_mb}}}};
}

void apply_override(Json& config, const std::string& dotted_key, const std::string& value_text) {
    std::string leaf;
    Json* parent = walk(config, dotted_key, leaf);
    Json value;
    try {
        value = Json::parse(value_text);
    } catch (const nlohmann::json::parse_error&) {
        value = value_text;
    }
    (*parent)[leaf] = std::move(value);
}

RunConfig config_from_json(const Json& doc) {
    const Section root(doc, "");
    root.allow_only({"seed", "policy", "cost_model", "noise", "scenario", "trace_path",
                     "database_path", "output_path", "enroll", "metrics", "memory_footprint"});
    RunConfig cfg;
    cfg.seed = root.u64("seed", cfg.seed);

    if (root.has("policy")) {
        const Section s = root.child("policy");
        s.allow_only({"mode", "face_period", "face_trigger_class", "emotion_scope",
                      "confidence_threshold", "match_threshold"});
        auto& p = cfg.policy;
        p.mode = parse_policy_mode(s.str("mode", std::string(to_string(p.mode))));
        const auto period = s.u64("face_period", p.face_period);
        if (period < 1 || period > UINT32_MAX) throw ValidationError("policy.face_period must be >= 1");
        p.face_period = static_cast<std::uint32_t>(period);
        p.face_trigger_class = s.str("face_trigger_class", p.face_trigger_class);
        p.emotion_scope = parse_emotion_scope(s.str("emotion_scope", std::string(to_string(p.emotion_scope))));
        p.confidence_threshold = s.real("confidence_threshold", p.confidence_threshold);
        p.match_threshold = s.real("match_threshold", p.match_threshold);
        if (p.mode == PolicyMode::Baseline) p.emotion_scope = EmotionScope::AllFaces;
        p.validate();
    }
    if (root.has("cost_model")) {
        const Section s = root.child("cost_model");
        s.allow_only({"detect_ms", "face_ms", "emotion_ms", "overhead_ms"});
        auto& c = cfg.cost_model;
        c.detect_ms = s.real("detect_ms", c.detect_ms);
        c.face_ms = s.real("face_ms", c.face_ms);
        c.emotion_ms = s.real("emotion_ms", c.emotion_ms);
        c.overhead_ms = s.real("overhead_ms", c.overhead_ms);
        c.validate();
    }
    if (root.has("noise")) {
        const Section s = root.child("noise");
        s.allow_only({"embedding_sigma", "emotion_accuracy", "confidence_jitter"});
        auto& n = cfg.noise;
        n.embedding_sigma = s.real("embedding_sigma", n.embedding_sigma);
        n.emotion_accuracy = s.real("emotion_accuracy", n.emotion_accuracy);
        n.confidence_jitter = s.real("confidence_jitter", n.confidence_jitter);
    }
    cfg.noise.seed = cfg.seed;
    cfg.noise.validate();

    if (root.has("enroll")) {
        const Section s = root.child("enroll");
        s.allow_only({"identity", "count", "sigma"});
        cfg.enroll.identity = s.str("identity", cfg.enroll.identity);
        cfg.enroll.count = s.u64("count", cfg.enroll.count);
        cfg.enroll.sigma = s.real("sigma", cfg.enroll.sigma);
        if (cfg.enroll.identity.empty()) throw ValidationError("enroll.identity must not be empty");
        if (cfg.enroll.count < 1) throw ValidationError("enroll.count must be >= 1");
        if (!(cfg.enroll.sigma >= 0.0)) throw ValidationError("enroll.sigma must be >= 0");
    }
    if (root.has("metrics")) {
        const Section s = root.child("metrics");
        s.allow_only({"window"});
        cfg.metrics_window = s.u64("window", cfg.metrics_window);
        if (cfg.metrics_window < 1) throw ValidationError("metrics.window must be >= 1");
    }
    if (root.has("memory_footprint")) {
        const Section s = root.child("memory_footprint");
        s.allow_only({"base_mb", "detect_mb", "face_mb", "emotion_mb"});
        auto& m = cfg.memory_footprint;
        m.base_mb = s.real("base_mb", m.base_mb);
        m.detect_mb = s.real("detect_mb", m.detect_mb);
        m.face_mb = s.real("face_mb", m.face_mb);
        m.emotion_mb = s.real("emotion_mb", m.emotion_mb);
    }

    if (root.has("scenario") && root.has("trace_path")) {
        throw ValidationError("config must set exactly one of scenario or trace_path");
    }
    if (root.has("scenario")) {
        cfg.scenario = rethrow_with_field("scenario", [&] {
            return decode_scenario(root.child("scenario"), cfg.seed);
        });
    }
    auto input_path = [&](const char* key) -> std::optional<std::filesystem::path> {
        if (!root.has(key)) return std::nullopt;
        std::filesystem::path p = root.str(key, "");
        if (!std::filesystem::exists(p)) {
            throw ValidationError(std::string(key) + ": file does not exist: " + p.string());
        }
        return p;
    };
    cfg.trace_path = input_path("trace_path");
    cfg.database_path = input_path("database_path");
    if (root.has("output_path")) cfg.output_path = root.str("output_path", "");
    return cfg;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    Json doc = default_config_json();
    if (file) {
        const Json from_file = parse_json_text(read_text_file(*file), file->string());
        if (!from_file.is_object()) throw ParseError(file->string() + ": expected a JSON object");
        doc.merge_patch(from_file);
    }
    for (const auto& [key, value] : overrides) apply_override(doc, key, value);
    return config_from_json(doc);
}

}  // namespace gatesim
