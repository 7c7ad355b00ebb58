#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gatesim/core.hpp"

namespace gatesim {

using Json = nlohmann::ordered_json;

// Trace document: {version, seed, frames: [{index, objects: [{class,
// confidence, box}], faces: [{identity, emotion, box}]}]}; boxes are
// [x, y, w, h] arrays.
Json trace_to_json(const ScenarioTrace& trace);
// Throws ParseError naming the offending JSON path.
ScenarioTrace trace_from_json(const Json& doc);

std::string dump_trace(const ScenarioTrace& trace);
// Throws ParseError with the byte offset of a syntax error.
ScenarioTrace parse_trace(std::string_view text);

Json parse_json_text(std::string_view text, std::string_view what);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary sibling and renames, so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view text);

Json box_to_json(const Box& b);
Box box_from_json(const Json& j, const std::string& where);

}  // namespace gatesim
