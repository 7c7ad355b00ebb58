#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gatesim/config.hpp"
#include "gatesim/report.hpp"
#include "gatesim/simulator.hpp"
#include "gatesim/trace_io.hpp"

namespace gatesim {
namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("gatesim_ser_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                 "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

std::string expect_parse_error(std::string_view text) {
    try {
        parse_trace(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no ParseError for: " << text;
    return {};
}

TEST(TraceJson, RoundTripIsExact) {
    ScenarioSpec spec;
    spec.frame_count = 300;
    spec.intruder_names = {"alice", "bob"};
    const auto trace = generate_trace(spec);
    const std::string text = dump_trace(trace);
    const auto back = parse_trace(text);
    EXPECT_EQ(back, trace);
    EXPECT_EQ(dump_trace(back), text);
}

TEST(TraceJson, DocumentShape) {
    ScenarioTrace t;
    t.seed = 7;
    FrameTruth f;
    f.objects.push_back({"person", 0.8, {10, 20, 100, 200}});
    f.faces.push_back({"owner", Emotion::Happy, {30, 40, 50, 60}});
    t.frames.push_back(f);
    const Json j = trace_to_json(t);
    EXPECT_EQ(j["version"], 1);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["frames"][0]["objects"][0]["class"], "person");
    EXPECT_EQ(j["frames"][0]["objects"][0]["box"], Json::parse("[10, 20, 100, 200]"));
    EXPECT_EQ(j["frames"][0]["faces"][0]["emotion"], "Happy");
}

TEST(TraceJson, SyntaxErrorReportsByteOffset) {
    const auto msg = expect_parse_error("{\"version\": 1,, }");
    EXPECT_NE(msg.find("parse error at byte"), std::string::npos) << msg;
}

TEST(TraceJson, SchemaErrorsNameThePath) {
    EXPECT_NE(expect_parse_error(R"({"seed": 1, "frames": []})").find("trace.version: missing field"),
              std::string::npos);
    EXPECT_NE(expect_parse_error(R"({"version": 2, "seed": 1, "frames": []})")
                  .find("unsupported trace version 2"),
              std::string::npos);
    const std::string bad_box =
        R"({"version": 1, "seed": 1, "frames": [{"index": 0, "objects": [{"class": "person", "confidence": 0.9, "box": [1, 2, 3]}], "faces": []}]})";
    EXPECT_NE(expect_parse_error(bad_box).find("trace.frames[0].objects[0].box"), std::string::npos);
    const std::string bad_emotion =
        R"({"version": 1, "seed": 1, "frames": [{"index": 0, "objects": [], "faces": [{"identity": "x", "emotion": "bored", "box": [0, 0, 1, 1]}]}]})";
    EXPECT_NE(expect_parse_error(bad_emotion).find("trace.frames[0].faces[0].emotion"), std::string::npos);
}

TEST(TextFiles, WriteThenReadAndMissingFile) {
    TempDir dir;
    write_text_file(dir / "a.txt", "hello\n");
    EXPECT_EQ(read_text_file(dir / "a.txt"), "hello\n");
    EXPECT_THROW(read_text_file(dir / "missing.txt"), ConfigError);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "")) ++entries;
    EXPECT_EQ(entries, 1u);
}

struct SimFixture {
    ScenarioTrace trace;
    OwnerDatabase db = synthesize_owner_database("owner", 20, 0.05, 42);
    NoiseConfig noise;

    SimFixture() {
        ScenarioSpec spec;
        spec.frame_count = 200;
        trace = generate_trace(spec);
    }
};

TEST(ReportJson, SimulationReportIsDeterministic) {
    const SimFixture fx;
    const auto a = run_simulation(fx.trace, GatingPolicy::adaptive(), &fx.db, {}, fx.noise);
    const auto b = run_simulation(fx.trace, GatingPolicy::adaptive(), &fx.db, {}, fx.noise);
    EXPECT_EQ(dump_report(simulation_report_to_json(a)), dump_report(simulation_report_to_json(b)));
}

TEST(ReportJson, SimulationKeysInOrder) {
    const SimFixture fx;
    const auto r = run_simulation(fx.trace, GatingPolicy::adaptive(), &fx.db, {}, fx.noise);
    const Json j = simulation_report_to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    const std::vector<std::string> expected = {
        "report_type", "format_version", "policy", "cost_model", "noise",
        "database_identity", "trace_hash", "frames", "total_time_ms", "module_time_ms",
        "average_fps", "avg_cost_per_frame_ms", "invocations", "peak_concurrent_stages",
        "proxies", "metrics", "outcomes", "frame_log"};
    EXPECT_EQ(keys, expected);
    EXPECT_EQ(j["report_type"], "simulation");
    EXPECT_EQ(j["trace_hash"], hex64(trace_fingerprint(fx.trace)));
    EXPECT_EQ(j["frame_log"].size(), 200u);
}

TEST(ReportJson, OutcomesRoundTrip) {
    const SimFixture fx;
    const auto r = run_simulation(fx.trace, GatingPolicy::baseline(), &fx.db, {}, fx.noise);
    const Json j = Json::parse(dump_report(simulation_report_to_json(r)));
    const auto back = outcomes_from_json(j);
    ASSERT_EQ(back.size(), r.outcomes.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].frame_index, r.outcomes[i].frame_index);
        EXPECT_EQ(back[i].identity, r.outcomes[i].identity);
        EXPECT_EQ(back[i].truth_owner, r.outcomes[i].truth_owner);
        EXPECT_EQ(back[i].similarity, r.outcomes[i].similarity);
        EXPECT_EQ(back[i].predicted_owner, r.outcomes[i].predicted_owner);
        EXPECT_EQ(back[i].true_emotion, r.outcomes[i].true_emotion);
        EXPECT_EQ(back[i].emotion, r.outcomes[i].emotion);
    }
    const auto m1 = evaluate_outcomes(r.outcomes);
    const auto m2 = evaluate_outcomes(back);
    EXPECT_EQ(dump_report(metrics_to_json(m1)), dump_report(metrics_to_json(m2)));
}

TEST(ReportJson, OutcomesErrorsNamePath) {
    Json j = Json::parse(R"({"outcomes": [{"frame": "x"}]})");
    try {
        outcomes_from_json(j);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("report.outcomes[0]"), std::string::npos) << e.what();
    }
}

TEST(ReportJson, ComparisonDocumentsCalibration) {
    const SimFixture fx;
    StageCostModel cost;
    cost.overhead_ms = 236.0;
    const auto c = compare(fx.trace, &fx.db, cost, fx.noise, GatingPolicy::adaptive());
    const Json j = comparison_report_to_json(c);
    EXPECT_EQ(j["report_type"], "comparison");
    EXPECT_EQ(j["same_trace"], true);
    EXPECT_EQ(j["overhead_calibration"]["single_overhead_matches_both"], false);
    EXPECT_TRUE(j["overhead_calibration"]["note"].is_string());
    EXPECT_EQ(j["baseline"]["trace_hash"], j["adaptive"]["trace_hash"]);
}

TEST(Config, DefaultsDecode) {
    const auto cfg = load_config(std::nullopt, {});
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.policy.mode, PolicyMode::Adaptive);
    EXPECT_EQ(cfg.policy.face_period, 5u);
    EXPECT_DOUBLE_EQ(cfg.cost_model.face_ms, 120.0);
    EXPECT_FALSE(cfg.scenario.has_value());
    EXPECT_FALSE(cfg.trace_path.has_value());
}

TEST(Config, OverridesBeatFileBeatsDefaults) {
    TempDir dir;
    {
        std::ofstream(dir / "c.json") << R"({"seed": 7, "policy": {"face_period": 3},
            "cost_model": {"overhead_ms": 10}, "scenario": {"frame_count": 50}})";
    }
    const auto cfg = load_config(dir / "c.json", {{"policy.face_period", "9"}, {"noise.emotion_accuracy", "0.5"}});
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.noise.seed, 7u);
    EXPECT_EQ(cfg.policy.face_period, 9u);
    EXPECT_DOUBLE_EQ(cfg.cost_model.overhead_ms, 10.0);
    EXPECT_DOUBLE_EQ(cfg.cost_model.detect_ms, 40.0);
    EXPECT_DOUBLE_EQ(cfg.noise.emotion_accuracy, 0.5);
    ASSERT_TRUE(cfg.scenario.has_value());
    EXPECT_EQ(cfg.scenario->frame_count, 50u);
    EXPECT_EQ(cfg.scenario->seed, 7u);
}

TEST(Config, StringOverrideAndBaselineScope) {
    const auto cfg = load_config(std::nullopt, {{"policy.mode", "baseline"}});
    EXPECT_EQ(cfg.policy.mode, PolicyMode::Baseline);
    EXPECT_EQ(cfg.policy.effective_emotion_scope(), EmotionScope::AllFaces);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    auto message = [](const std::vector<std::pair<std::string, std::string>>& ov) -> std::string {
        try {
            load_config(std::nullopt, ov);
        } catch (const ValidationError& e) {
            return e.what();
        }
        return "no error";
    };
    EXPECT_NE(message({{"policy.face_perod", "3"}}).find("policy.face_perod: unknown config key"),
              std::string::npos);
    EXPECT_NE(message({{"policy.face_period", "0"}}).find("face_period"), std::string::npos);
    EXPECT_NE(message({{"scenario.person_presence_rate", "1.5"}}).find("person_presence_rate out of range"),
              std::string::npos);
    EXPECT_NE(message({{"scenario.frame_count", "10"}, {"trace_path", "x.json"}}).find("exactly one"),
              std::string::npos);
    EXPECT_NE(message({{"database_path", "/nonexistent/db.bin"}}).find("database_path"), std::string::npos);
    EXPECT_THROW(load_config(std::nullopt, {{"cost_model.face_ms", "\"fast\""}}), ParseError);
}

}  // namespace
}  // namespace gatesim
