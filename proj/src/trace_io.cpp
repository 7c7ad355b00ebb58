#include "gatesim/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "gatesim/errors.hpp"

namespace gatesim {

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
    return *it;
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    return j.get<double>();
}

std::uint64_t unsigned_int(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned()) throw ParseError(where + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string string_of(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": expected a string");
    return j.get<std::string>();
}

const Json& array_of(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array");
    return j;
}

}  // namespace

Json box_to_json(const Box& b) { return Json::array({b.x, b.y, b.w, b.h}); }

Box box_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) throw ParseError(where + ": expected [x, y, w, h]");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]"),
            number(j[3], where + "[3]")};
}

Json trace_to_json(const ScenarioTrace& trace) {
    Json frames = Json::array();
    for (const auto& f : trace.frames) {
        Json objects = Json::array();
        for (const auto& o : f.objects) {
            objects.push_back(
                {{"class", o.class_label}, {"confidence", o.base_confidence}, {"box", box_to_json(o.box)}});
        }
        Json faces = Json::array();
        for (const auto& face : f.faces) {
            faces.push_back({{"identity", face.identity},
                             {"emotion", std::string(to_string(face.true_emotion))},
                             {"box", box_to_json(face.box)}});
        }
        frames.push_back({{"index", f.index}, {"objects", objects}, {"faces", faces}});
    }
    return {{"version", trace.version}, {"seed", trace.seed}, {"frames", frames}};
}

ScenarioTrace trace_from_json(const Json& doc) {
    ScenarioTrace trace;
    const std::string root = "trace";
    const auto version = unsigned_int(field(doc, "version", root), root + ".version");
    if (version != 1) throw ParseError(root + ".version: unsupported trace version " + std::to_string(version));
    trace.version = static_cast<std::uint32_t>(version);
    trace.seed = unsigned_int(field(doc, "seed", root), root + ".seed");

    const Json& frames = array_of(field(doc, "frames", root), root + ".frames");
    trace.frames.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string fw = root + ".frames[" + std::to_string(i) + "]";
        const Json& fj = frames[i];
        FrameTruth frame;
        frame.index = unsigned_int(field(fj, "index", fw), fw + ".index");

        const Json& objects = array_of(field(fj, "objects", fw), fw + ".objects");
        for (std::size_t k = 0; k < objects.size(); ++k) {
            const std::string ow = fw + ".objects[" + std::to_string(k) + "]";
            GroundObject o;
            o.class_label = string_of(field(objects[k], "class", ow), ow + ".class");
            o.base_confidence = number(field(objects[k], "confidence", ow), ow + ".confidence");
            o.box = box_from_json(field(objects[k], "box", ow), ow + ".box");
            frame.objects.push_back(std::move(o));
        }

        const Json& faces = array_of(field(fj, "faces", fw), fw + ".faces");
        for (std::size_t k = 0; k < faces.size(); ++k) {
            const std::string aw = fw + ".faces[" + std::to_string(k) + "]";
            GroundFace face;
            face.identity = string_of(field(faces[k], "identity", aw), aw + ".identity");
            const std::string emotion = string_of(field(faces[k], "emotion", aw), aw + ".emotion");
            auto parsed = parse_emotion(emotion);
            if (!parsed) throw ParseError(aw + ".emotion: unknown emotion '" + emotion + "'");
            face.true_emotion = *parsed;
            face.box = box_from_json(field(faces[k], "box", aw), aw + ".box");
            frame.faces.push_back(std::move(face));
        }
        trace.frames.push_back(std::move(frame));
    }
    return trace;
}

std::string dump_trace(const ScenarioTrace& trace) { return trace_to_json(trace).dump(1) + "\n"; }

Json parse_json_text(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(what) + ": parse error at byte " + std::to_string(e.byte) +
                         ": " + e.what());
    }
}

ScenarioTrace parse_trace(std::string_view text) {
    return trace_from_json(parse_json_text(text, "trace"));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace gatesim
