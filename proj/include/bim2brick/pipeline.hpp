#ifndef BIM2BRICK_PIPELINE_HPP
#define BIM2BRICK_PIPELINE_HPP

// End-to-end conversion pipeline: STEP parse -> model extraction -> occupant
// ingest -> localization -> relationship inference -> graph build -> Turtle
// serialization, with stage timings and a structured run report.

#include <bim2brick/brick_graph.hpp>
#include <bim2brick/diagnostics.hpp>
#include <bim2brick/geo_transform.hpp>
#include <bim2brick/ifc_model.hpp>
#include <bim2brick/inference.hpp>
#include <bim2brick/occupants.hpp>
#include <bim2brick/step_parser.hpp>
#include <bim2brick/turtle.hpp>

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bim2brick::pipeline {

class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string ifc_path;
    std::optional<std::string> occupants_path;
    brick::Mode mode = brick::Mode::DigitalTwin;
    std::string out_path;

    // site calibration (required for people / digital-twin)
    std::optional<double> origin_lat;
    std::optional<double> origin_lon;
    double origin_alt = 0;
    double rotation_deg = 0;
    double scale = 1.0;

    std::optional<std::string> as_of;  // RFC 3339 instant for sample selection
    std::optional<std::string> report_path;
    bool strict = false;
    brick::BuildOptions build_options;
};

struct StageTiming {
    std::string stage;
    double ms = 0;
};

struct RunReport {
    std::string mode;
    std::string out_path;
    std::map<std::string, std::size_t> nodes_by_class;
    std::map<std::string, std::size_t> relations_by_kind;
    std::size_t triple_count = 0;
    std::size_t occupants_ingested = 0;
    std::size_t occupants_validated = 0;
    Diagnostics diagnostics;
    std::vector<StageTiming> timings;
    double total_ms = 0;
};

// ---- small file helpers -----------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

// write-to-temp + rename so readers never observe a half-written file
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

// ---- config validation ------------------------------------------------------

inline void validate_config(const RunConfig& cfg) {
    if (cfg.ifc_path.empty()) throw UsageError("--ifc is required");
    if (cfg.out_path.empty()) throw UsageError("--out is required");
    const bool needs_occupants =
        cfg.mode == brick::Mode::People || cfg.mode == brick::Mode::DigitalTwin;
    if (needs_occupants) {
        if (!cfg.occupants_path)
            throw UsageError(std::string(brick::to_string(cfg.mode)) +
                             " mode requires --occupants");
        if (!cfg.origin_lat || !cfg.origin_lon)
            throw UsageError(std::string(brick::to_string(cfg.mode)) +
                             " mode requires the site transform (--origin-lat, --origin-lon)");
    }
    if (cfg.as_of && !occ::parse_rfc3339_ms(*cfg.as_of))
        throw UsageError("--as-of is not an RFC 3339 instant: '" + *cfg.as_of + "'");
    if (cfg.scale <= 0) throw UsageError("--scale must be positive");
}

// ---- report rendering -------------------------------------------------------

inline std::string render_report_text(const RunReport& report) {
    std::ostringstream out;
    out << "mode: " << report.mode << "\n";
    out << "output: " << report.out_path << "\n";
    out << "triples: " << report.triple_count << "\n";
    out << "nodes by class:\n";
    for (const auto& [cls, n] : report.nodes_by_class) out << "  " << cls << ": " << n << "\n";
    out << "relations by kind:\n";
    for (const auto& [kind, n] : report.relations_by_kind) out << "  " << kind << ": " << n << "\n";
    if (report.occupants_ingested || report.occupants_validated)
        out << "occupants: " << report.occupants_validated << " validated of "
            << report.occupants_ingested << " ingested\n";
    if (!report.diagnostics.empty()) {
        out << "diagnostics (" << report.diagnostics.size() << "):\n";
        for (const auto& d : report.diagnostics) {
            out << "  [" << to_string(d.severity) << "] " << d.code;
            if (!d.source_id.empty()) out << " (" << d.source_id << ")";
            out << ": " << d.message << "\n";
        }
    }
    out << "stages:\n";
    for (const auto& t : report.timings) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "  %s: %.1f ms\n", t.stage.c_str(), t.ms);
        out << buf;
    }
    {
        char buf[48];
        std::snprintf(buf, sizeof buf, "total: %.1f ms\n", report.total_ms);
        out << buf;
    }
    return std::move(out).str();
}

inline nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["output"] = report.out_path;
    j["triples"] = report.triple_count;
    j["nodes_by_class"] = report.nodes_by_class;
    j["relations_by_kind"] = report.relations_by_kind;
    j["occupants"] = {{"ingested", report.occupants_ingested},
                      {"validated", report.occupants_validated}};
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : report.diagnostics)
        j["diagnostics"].push_back({{"code", d.code},
                                    {"severity", to_string(d.severity)},
                                    {"source_id", d.source_id},
                                    {"message", d.message}});
    j["stages_ms"] = nlohmann::json::object();
    for (const auto& t : report.timings) j["stages_ms"][t.stage] = t.ms;
    j["total_ms"] = report.total_ms;
    return j;
}

// ---- the pipeline -----------------------------------------------------------

// Runs one conversion. Throws UsageError for config violations and Error for
// fatal input problems; everything recoverable lands in report.diagnostics.
inline RunReport run(const RunConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    validate_config(cfg);

    RunReport report;
    report.mode = brick::to_string(cfg.mode);
    report.out_path = cfg.out_path;

    const auto t0 = Clock::now();
    auto stage = [&, last = t0](const char* name) mutable {
        const auto now = Clock::now();
        report.timings.push_back(
            {name, std::chrono::duration<double, std::milli>(now - last).count()});
        last = now;
    };

    const bool want_people = cfg.mode != brick::Mode::Bms;
    const bool want_bms = cfg.mode != brick::Mode::People;

    // parse + extract
    const std::string step_text = read_file(cfg.ifc_path);
    step::StepFile file = step::resolve_refs(step::parse_step(step_text));
    for (const auto& [referrer, target] : file.dangling)
        add_diag(report.diagnostics, "dangling-ref", Severity::Warning,
                 "#" + std::to_string(referrer),
                 "record #" + std::to_string(referrer) + " references missing #" +
                     std::to_string(target));
    stage("parse");

    ifc::ExtractResult extracted = ifc::extract_model(file);
    report.diagnostics.insert(report.diagnostics.end(), extracted.diagnostics.begin(),
                              extracted.diagnostics.end());
    const ifc::BuildingModel& model = extracted.model;
    stage("extract");

    // occupants
    occ::OccupantSet validated;
    if (cfg.occupants_path && !want_people) {
        add_diag(report.diagnostics, "occupants-ignored", Severity::Notice, "",
                 "bms mode converts building equipment only; --occupants is ignored");
    } else if (cfg.occupants_path) {
        occ::IngestResult ingest = occ::ingest_occupants(read_file(*cfg.occupants_path));
        report.diagnostics.insert(report.diagnostics.end(), ingest.diagnostics.begin(),
                                  ingest.diagnostics.end());
        report.occupants_ingested = ingest.set.occupants.size();
        validated = occ::filter_defined(ingest.set, &report.diagnostics);
        report.occupants_validated = validated.occupants.size();

        const geo::SiteTransform site = geo::make_site_transform(
            *cfg.origin_lat, *cfg.origin_lon, cfg.origin_alt, cfg.rotation_deg, cfg.scale);
        occ::localize_all(validated, site, &report.diagnostics);
    }
    stage("ingest");

    // inference
    const infer::ContainmentIndex index = infer::make_containment_index(model);
    infer::RelationSet relations;
    if (want_bms) {
        infer::InferResult rooms = infer::infer_equipment_rooms(model, index);
        infer::InferResult feeds = infer::infer_feeds(model, rooms.relations);
        infer::InferResult controls = infer::infer_controls(model, rooms.relations, feeds.relations);
        for (auto* r : {&rooms, &feeds, &controls}) {
            relations.insert(relations.end(), r->relations.begin(), r->relations.end());
            report.diagnostics.insert(report.diagnostics.end(), r->diagnostics.begin(),
                                      r->diagnostics.end());
        }
    }
    if (want_people && !validated.occupants.empty()) {
        std::optional<std::int64_t> as_of_ms;
        if (cfg.as_of) as_of_ms = occ::parse_rfc3339_ms(*cfg.as_of);
        infer::InferResult occ_rooms = infer::infer_occupant_rooms(validated, index, as_of_ms);
        relations.insert(relations.end(), occ_rooms.relations.begin(), occ_rooms.relations.end());
        report.diagnostics.insert(report.diagnostics.end(), occ_rooms.diagnostics.begin(),
                                  occ_rooms.diagnostics.end());
    }
    infer::canonicalize(relations);
    stage("infer");

    // graph + serialization
    brick::BrickGraph graph =
        brick::build_graph(model, relations, validated, cfg.mode, cfg.build_options);
    report.nodes_by_class = graph.count_nodes_by_class();
    report.relations_by_kind = graph.count_relations_by_kind();
    report.triple_count = graph.triples.size();
    stage("build");

    const std::string turtle = brick::serialize_turtle(graph);
    stage("serialize");

    write_atomic(cfg.out_path, turtle);
    stage("write");

    report.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (cfg.report_path) write_atomic(*cfg.report_path, report_to_json(report).dump(2) + "\n");
    return report;
}

}  // namespace bim2brick::pipeline

#endif
