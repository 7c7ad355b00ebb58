#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gatesim/report.hpp"
#include "gatesim/scheduler.hpp"
#include "gatesim/simulator.hpp"
#include "gatesim/stages.hpp"
#include "gatesim/trace_io.hpp"

namespace gatesim {

struct EnrollSettings {
    std::string identity = "owner";
    std::uint64_t count = kDefaultEnrollmentSize;
    double sigma = 0.05;
};

/// Everything a command needs. `seed` drives the noise streams and, unless the
/// scenario sets its own, trace generation.
struct RunConfig {
    std::uint64_t seed = 42;
    GatingPolicy policy;
    StageCostModel cost_model;
    NoiseConfig noise;
    std::optional<ScenarioSpec> scenario;
    std::optional<std::filesystem::path> trace_path;
    std::optional<std::filesystem::path> database_path;
    std::optional<std::filesystem::path> output_path;
    EnrollSettings enroll;
    std::size_t metrics_window = kDefaultAccuracyWindow;
    MemoryFootprint memory_footprint;
};

// Built-in defaults as a config document (no scenario, no paths).
Json default_config_json();

// Sets a dotted path ("policy.face_period") to a value. The value text is
// read as JSON when it parses, otherwise taken as a plain string.
void apply_override(Json& config, const std::string& dotted_key, const std::string& value_text);

// Strict decoding: unknown keys and out-of-range values raise ValidationError
// naming the field; type mismatches raise ParseError.
RunConfig config_from_json(const Json& doc);

// defaults < file < overrides, then decoded.
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace gatesim
