#include "gatesim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "gatesim/config.hpp"
#include "gatesim/embedding_store.hpp"
#include "gatesim/errors.hpp"
#include "gatesim/report.hpp"
#include "gatesim/simulator.hpp"
#include "gatesim/trace_io.hpp"

namespace gatesim::cli {

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct CommonFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<double> overhead_ms;
    std::optional<std::string> out;
    std::optional<std::string> trace;
    std::optional<std::string> db;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--seed", f.seed, "Seed for noise streams and trace generation");
    cmd->add_option("--policy", f.policy, "adaptive | baseline");
    cmd->add_option("--overhead-ms", f.overhead_ms, "Fixed per-frame overhead (ms)");
    cmd->add_option("--out", f.out, "Output file (stdout when omitted)");
    cmd->add_option("--trace", f.trace, "Trace file (same as trace_path)");
    cmd->add_option("--db", f.db, "Owner database file (same as database_path)");
    cmd->allow_extras();
}

// Turns leftover "--a.b value" / "--a.b=value" tokens into dotted overrides.
Overrides dotted_overrides(const std::vector<std::string>& extras) {
    Overrides out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() <= 2) {
            throw ValidationError("unexpected argument '" + tok + "'");
        }
        std::string key = tok.substr(2);
        if (auto eq = key.find('='); eq != std::string::npos) {
            out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
            continue;
        }
        if (key.find('.') == std::string::npos) {
            throw ValidationError("unknown option '" + tok + "'");
        }
        if (i + 1 >= extras.size()) throw ValidationError("option '" + tok + "' needs a value");
        out.emplace_back(key, extras[++i]);
    }
    return out;
}

std::string json_string(const std::string& s) { return Json(s).dump(); }

RunConfig resolve_config(const CommonFlags& f, const std::vector<std::string>& extras,
                         Overrides extra_overrides = {}) {
    Overrides o;
    if (f.seed) o.emplace_back("seed", std::to_string(*f.seed));
    if (f.policy) o.emplace_back("policy.mode", json_string(*f.policy));
    if (f.overhead_ms) {
        std::ostringstream v;
        v << std::setprecision(17) << *f.overhead_ms;
        o.emplace_back("cost_model.overhead_ms", v.str());
    }
    if (f.out) o.emplace_back("output_path", json_string(*f.out));
    if (f.trace) o.emplace_back("trace_path", json_string(*f.trace));
    if (f.db) o.emplace_back("database_path", json_string(*f.db));
    o.insert(o.end(), extra_overrides.begin(), extra_overrides.end());
    // Dotted flags come last so they win over the shorthand flags too.
    const Overrides dotted = dotted_overrides(extras);
    o.insert(o.end(), dotted.begin(), dotted.end());

    std::optional<std::filesystem::path> file;
    if (f.config) file = *f.config;
    return load_config(file, o);
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output_path) {
        write_text_file(*cfg.output_path, text);
    } else {
        out << text;
    }
}

ScenarioTrace resolve_trace(const RunConfig& cfg) {
    if (cfg.trace_path) {
        ScenarioTrace trace = parse_trace(read_text_file(*cfg.trace_path));
        if (auto v = validate_trace(trace); !v.ok()) {
            throw ValidationError("trace_path: invalid trace: " + v.summary());
        }
        return trace;
    }
    ScenarioSpec spec = cfg.scenario.value_or(ScenarioSpec{});
    if (!cfg.scenario) spec.seed = cfg.seed;
    return generate_trace(spec);
}

OwnerDatabase require_database(const RunConfig& cfg) {
    if (!cfg.database_path) {
        throw ConfigError("database_path is required: the face stage needs an owner database");
    }
    return load_database(*cfg.database_path);
}

int cmd_gen_trace(const RunConfig& cfg, std::ostream& out) {
    ScenarioSpec spec = cfg.scenario.value_or(ScenarioSpec{});
    if (!cfg.scenario) spec.seed = cfg.seed;
    const ScenarioTrace trace = generate_trace(spec);
    emit(cfg, dump_trace(trace), out);
    return kSuccess;
}

int cmd_enroll(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.output_path) throw ConfigError("enroll needs --out for the database file");
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    const OwnerDatabase db = synthesize_owner_database(cfg.enroll.identity, cfg.enroll.count,
                                                       cfg.enroll.sigma, cfg.seed, now);
    save_database(db, *cfg.output_path);
    out << "enrolled " << db.size() << " embeddings for '" << db.identity() << "' -> "
        << cfg.output_path->string() << "\n";
    return kSuccess;
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
    const OwnerDatabase db = require_database(cfg);
    const ScenarioTrace trace = resolve_trace(cfg);
    const SimulationReport report =
        run_simulation(trace, cfg.policy, &db, cfg.cost_model, cfg.noise, cfg.memory_footprint);
    emit(cfg, dump_report(simulation_report_to_json(report, cfg.metrics_window)), out);
    return kSuccess;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    if (cfg.policy.mode != PolicyMode::Adaptive) {
        throw ValidationError("policy.mode: compare needs an adaptive policy to compare against the baseline");
    }
    const OwnerDatabase db = require_database(cfg);
    const ScenarioTrace trace = resolve_trace(cfg);
    const ComparisonReport report =
        compare(trace, &db, cfg.cost_model, cfg.noise, cfg.policy, cfg.memory_footprint);
    emit(cfg, dump_report(comparison_report_to_json(report, cfg.metrics_window)), out);
    return kSuccess;
}

void print_value(std::ostream& out, const std::optional<double>& v) {
    if (v) {
        out << std::fixed << std::setprecision(4) << *v;
    } else {
        out << "n/a";
    }
}

void print_metrics(std::ostream& out, const std::string& title, const OutcomeMetrics& m) {
    out << "== " << title << " ==\n";
    if (m.match_confusion) {
        const auto& c = *m.match_confusion;
        out << "match confusion: tp=" << c.tp << " fp=" << c.fp << " tn=" << c.tn << " fn=" << c.fn
            << "\n";
        out << "match accuracy: ";
        print_value(out, c.accuracy());
        out << "\n";
    } else {
        out << "match confusion: n/a\n";
    }
    out << "match auc: ";
    print_value(out, m.match_auc);
    out << "\nmatch ap: ";
    print_value(out, m.match_ap);
    out << "\nemotion samples: " << m.emotion_samples << "\n";
    out << "emotion accuracy: ";
    print_value(out, m.emotion_samples ? std::optional<double>(m.emotion_accuracy) : std::nullopt);
    out << "\n";
    out << "class      auc      ap\n";
    for (Emotion e : kAllEmotions) {
        const auto& c = m.per_class[index_of(e)];
        out << std::left << std::setw(10) << to_string(e) << " ";
        print_value(out, c.auc);
        out << "   ";
        print_value(out, c.ap);
        out << "\n";
    }
    out << std::right;
    if (!m.windowed_accuracy.empty()) {
        const auto [lo, hi] = std::minmax_element(
            m.windowed_accuracy.begin(), m.windowed_accuracy.end(),
            [](const WindowPoint& a, const WindowPoint& b) { return a.accuracy < b.accuracy; });
        out << "windowed accuracy (window " << m.window << "): min ";
        print_value(out, lo->accuracy);
        out << " max ";
        print_value(out, hi->accuracy);
        out << " points " << m.windowed_accuracy.size() << "\n";
    }
}

int cmd_eval(const std::string& path, std::optional<std::size_t> window, std::ostream& out) {
    const Json doc = parse_json_text(read_text_file(path), path);
    if (!doc.is_object() || !doc.contains("report_type") || !doc["report_type"].is_string()) {
        throw ParseError(path + ": missing report_type");
    }
    auto window_of = [&](const Json& sim) -> std::size_t {
        if (window) return *window;
        const auto* w = &sim;
        for (const char* key : {"metrics", "emotion", "window"}) {
            if (!w->is_object() || !w->contains(key)) return kDefaultAccuracyWindow;
            w = &(*w)[key];
        }
        return w->is_number_unsigned() && w->get<std::size_t>() > 0 ? w->get<std::size_t>()
                                                                     : kDefaultAccuracyWindow;
    };

    const std::string type = doc["report_type"].get<std::string>();
    if (type == "simulation") {
        const auto outcomes = outcomes_from_json(doc, "report");
        print_metrics(out, "simulation", evaluate_outcomes(outcomes, window_of(doc)));
    } else if (type == "comparison") {
        for (const char* section : {"baseline", "adaptive"}) {
            if (!doc.contains(section)) throw ParseError(path + ": missing " + section);
            const auto outcomes = outcomes_from_json(doc[section], std::string("report.") + section);
            print_metrics(out, section, evaluate_outcomes(outcomes, window_of(doc[section])));
        }
    } else {
        throw ParseError(path + ": unknown report_type '" + type + "'");
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trace-driven simulator for adaptive gating of perception pipelines", "gatesim"};
    app.require_subcommand(1);

    CommonFlags gen_flags, enroll_flags, run_flags, compare_flags;
    auto* gen = app.add_subcommand("gen-trace", "Generate a scenario trace");
    add_common(gen, gen_flags);

    auto* enroll_cmd = app.add_subcommand("enroll", "Write a synthetic owner database (EMBDB1)");
    add_common(enroll_cmd, enroll_flags);
    std::optional<std::string> identity;
    std::optional<std::uint64_t> count;
    std::optional<double> sigma;
    enroll_cmd->add_option("--identity", identity, "Enrolled identity tag");
    enroll_cmd->add_option("--count", count, "Number of embeddings");
    enroll_cmd->add_option("--sigma", sigma, "Noise norm around the prototype");

    auto* run_cmd = app.add_subcommand("run", "Simulate one policy and write a report");
    add_common(run_cmd, run_flags);

    auto* compare_cmd = app.add_subcommand("compare", "Simulate baseline vs adaptive");
    add_common(compare_cmd, compare_flags);

    auto* eval_cmd = app.add_subcommand("eval", "Print metrics from a report file");
    std::string report_path;
    std::optional<std::size_t> window;
    eval_cmd->add_option("report", report_path, "Report file")->required();
    eval_cmd->add_option("--window", window, "Accuracy window (classified faces)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_trace(resolve_config(gen_flags, gen->remaining()), out);
        }
        if (enroll_cmd->parsed()) {
            Overrides o;
            if (identity) o.emplace_back("enroll.identity", json_string(*identity));
            if (count) o.emplace_back("enroll.count", std::to_string(*count));
            if (sigma) {
                std::ostringstream v;
                v << std::setprecision(17) << *sigma;
                o.emplace_back("enroll.sigma", v.str());
            }
            return cmd_enroll(resolve_config(enroll_flags, enroll_cmd->remaining(), o), out);
        }
        if (run_cmd->parsed()) {
            return cmd_run(resolve_config(run_flags, run_cmd->remaining()), out);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(resolve_config(compare_flags, compare_cmd->remaining()), out);
        }
        if (eval_cmd->parsed()) {
            if (window && *window == 0) throw ValidationError("--window must be >= 1");
            return cmd_eval(report_path, window, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const DatabaseError& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == DatabaseErrorCode::Io ? kRuntimeError : kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    err << "error: no command\n";
    return kValidationError;
}

}  // namespace gatesim::cli
