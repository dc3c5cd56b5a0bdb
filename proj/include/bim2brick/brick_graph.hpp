#ifndef BIM2BRICK_BRICK_GRAPH_HPP
#define BIM2BRICK_BRICK_GRAPH_HPP

// BRICK knowledge-graph construction: a fixed taxonomy subset, triple store
// with canonical ordering, and the mode-dependent builder (People / BMS /
// DigitalTwin) that carries BIM source identifiers onto every instance.

#include <bim2brick/diagnostics.hpp>
#include <bim2brick/ifc_model.hpp>
#include <bim2brick/inference.hpp>
#include <bim2brick/occupants.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bim2brick::brick {

class EmptyModel : public Error {
public:
    EmptyModel() : Error("building model is empty; nothing to convert") {}
};

// ---- namespaces -------------------------------------------------------------

inline constexpr const char* kBrickNs = "https://brickschema.org/schema/Brick#";
inline constexpr const char* kToolNs = "urn:bim2brick:schema#";
inline constexpr const char* kOccNsDefault = "urn:bim2brick:occupant#";
inline constexpr const char* kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";

inline constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";

// IRI-local sanitization: anything outside [A-Za-z0-9_] becomes '_'
inline std::string sanitize_local(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        out += ok ? c : '_';
    }
    if (out.empty()) out = "_";
    if (out[0] >= '0' && out[0] <= '9') out.insert(out.begin(), '_');
    return out;
}

// ---- taxonomy ---------------------------------------------------------------

enum class BrickClass {
    Building,
    Floor,
    Room,
    HvacZone,
    Vav,
    Fcu,
    Thermostat,
    TerminalUnit,
    Co2Sensor,
    TemperatureSensor,
    HumiditySensor,
    Occupant,
    Individual,
    Point,  // category parent of the sensor classes
};

inline constexpr BrickClass kAllClasses[] = {
    BrickClass::Building,     BrickClass::Floor,      BrickClass::Room,
    BrickClass::HvacZone,     BrickClass::Vav,        BrickClass::Fcu,
    BrickClass::Thermostat,   BrickClass::TerminalUnit, BrickClass::Co2Sensor,
    BrickClass::TemperatureSensor, BrickClass::HumiditySensor, BrickClass::Occupant,
    BrickClass::Individual,   BrickClass::Point,
};

inline const char* class_local_name(BrickClass c) {
    switch (c) {
        case BrickClass::Building: return "Building";
        case BrickClass::Floor: return "Floor";
        case BrickClass::Room: return "Room";
        case BrickClass::HvacZone: return "HVAC_Zone";
        case BrickClass::Vav: return "Variable_Air_Volume_Box";
        case BrickClass::Fcu: return "Fan_Coil_Unit";
        case BrickClass::Thermostat: return "Thermostat";
        case BrickClass::TerminalUnit: return "Terminal_Unit";
        case BrickClass::Co2Sensor: return "CO2_Sensor";
        case BrickClass::TemperatureSensor: return "Temperature_Sensor";
        case BrickClass::HumiditySensor: return "Humidity_Sensor";
        case BrickClass::Occupant: return "Occupant";
        case BrickClass::Individual: return "Individual";
        case BrickClass::Point: return "Point";
    }
    return "?";
}

// occupant classes live in the extension namespace; everything else in brick:
inline std::string class_iri(BrickClass c, const std::string& occ_ns = kOccNsDefault) {
    const bool occupant = c == BrickClass::Occupant || c == BrickClass::Individual;
    return (occupant ? occ_ns : std::string(kBrickNs)) + class_local_name(c);
}

// direct subclass edges: Individual < Occupant, sensors < Point
inline std::optional<BrickClass> parent_class(BrickClass c) {
    switch (c) {
        case BrickClass::Individual: return BrickClass::Occupant;
        case BrickClass::Co2Sensor:
        case BrickClass::TemperatureSensor:
        case BrickClass::HumiditySensor: return BrickClass::Point;
        default: return std::nullopt;
    }
}

inline bool is_subclass_of(BrickClass a, BrickClass b) {
    if (a == b) return true;
    for (auto p = parent_class(a); p; p = parent_class(*p))
        if (*p == b) return true;
    return false;
}

// ---- relation vocabulary ----------------------------------------------------

enum class BrickRel {
    HasPart,
    IsPartOf,
    HasLocation,
    IsLocationOf,
    Feeds,
    IsFedBy,
    HasPoint,
    IsPointOf,
    HasTag,
    IsTagOf,
};

inline const char* rel_local_name(BrickRel r) {
    switch (r) {
        case BrickRel::HasPart: return "hasPart";
        case BrickRel::IsPartOf: return "isPartOf";
        case BrickRel::HasLocation: return "hasLocation";
        case BrickRel::IsLocationOf: return "isLocationOf";
        case BrickRel::Feeds: return "feeds";
        case BrickRel::IsFedBy: return "isFedBy";
        case BrickRel::HasPoint: return "hasPoint";
        case BrickRel::IsPointOf: return "isPointOf";
        case BrickRel::HasTag: return "hasTag";
        case BrickRel::IsTagOf: return "isTagOf";
    }
    return "?";
}

inline BrickRel inverse(BrickRel r) {
    switch (r) {
        case BrickRel::HasPart: return BrickRel::IsPartOf;
        case BrickRel::IsPartOf: return BrickRel::HasPart;
        case BrickRel::HasLocation: return BrickRel::IsLocationOf;
        case BrickRel::IsLocationOf: return BrickRel::HasLocation;
        case BrickRel::Feeds: return BrickRel::IsFedBy;
        case BrickRel::IsFedBy: return BrickRel::Feeds;
        case BrickRel::HasPoint: return BrickRel::IsPointOf;
        case BrickRel::IsPointOf: return BrickRel::HasPoint;
        case BrickRel::HasTag: return BrickRel::IsTagOf;
        case BrickRel::IsTagOf: return BrickRel::HasTag;
    }
    return r;
}

inline std::string rel_iri(BrickRel r) { return std::string(kBrickNs) + rel_local_name(r); }

// ---- triple store -----------------------------------------------------------

struct RdfObject {
    enum class Kind { Iri, String, Integer };
    Kind kind = Kind::Iri;
    std::string text;          // IRI or string value
    std::int64_t number = 0;   // integer value

    static RdfObject iri(std::string v) { return {Kind::Iri, std::move(v), 0}; }
    static RdfObject str(std::string v) { return {Kind::String, std::move(v), 0}; }
    static RdfObject integer(std::int64_t v) { return {Kind::Integer, {}, v}; }

    friend bool operator==(const RdfObject&, const RdfObject&) = default;
    friend bool operator<(const RdfObject& a, const RdfObject& b) {
        if (a.kind != b.kind) return a.kind < b.kind;  // IRIs before literals
        if (a.kind == Kind::Integer) return a.number < b.number;
        return a.text < b.text;
    }
};

struct Triple {
    std::string subject;    // absolute IRI
    std::string predicate;  // absolute IRI
    RdfObject object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// rdf:type sorts before every other predicate within a subject block
inline bool triple_less(const Triple& a, const Triple& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    const bool at = a.predicate == kRdfType, bt = b.predicate == kRdfType;
    if (at != bt) return at;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.object < b.object;
}

struct BrickGraph {
    std::vector<std::pair<std::string, std::string>> prefixes;  // (prefix, IRI), sorted by prefix
    std::vector<Triple> triples;                                // canonical order, unique

    void add(std::string subject, std::string predicate, RdfObject object) {
        triples.push_back({std::move(subject), std::move(predicate), std::move(object)});
    }

    void canonicalize() {
        std::sort(prefixes.begin(), prefixes.end());
        prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
        std::sort(triples.begin(), triples.end(), triple_less);
        triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    }

    std::optional<std::string> type_of(const std::string& subject) const {
        for (const auto& t : triples)
            if (t.subject == subject && t.predicate == kRdfType && t.object.kind == RdfObject::Kind::Iri)
                return t.object.text;
        return std::nullopt;
    }

    // every subject carrying a b2b:sourceId annotation, in triple order
    std::vector<std::pair<std::string, std::string>> instances() const {
        std::vector<std::pair<std::string, std::string>> out;
        const std::string pred = std::string(kToolNs) + "sourceId";
        for (const auto& t : triples)
            if (t.predicate == pred && t.object.kind == RdfObject::Kind::String)
                out.emplace_back(t.subject, t.object.text);
        return out;
    }

    std::map<std::string, std::size_t> count_nodes_by_class() const {
        std::map<std::string, std::size_t> counts;
        for (const auto& t : triples)
            if (t.predicate == kRdfType && t.object.kind == RdfObject::Kind::Iri) {
                auto hash = t.object.text.rfind('#');
                counts[hash == std::string::npos ? t.object.text : t.object.text.substr(hash + 1)]++;
            }
        return counts;
    }

    // object-property triples only (brick: predicates)
    std::map<std::string, std::size_t> count_relations_by_kind() const {
        std::map<std::string, std::size_t> counts;
        for (const auto& t : triples) {
            if (t.object.kind != RdfObject::Kind::Iri) continue;
            if (t.predicate.rfind(kBrickNs, 0) == 0)
                counts[t.predicate.substr(std::string(kBrickNs).size())]++;
        }
        return counts;
    }

    friend bool operator==(const BrickGraph&, const BrickGraph&) = default;
};

// set operations over canonical triple lists
inline std::vector<Triple> triple_union(std::vector<Triple> a, const std::vector<Triple>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end(), triple_less);
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

// ---- builder ----------------------------------------------------------------

enum class Mode { People, Bms, DigitalTwin };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::People: return "people";
        case Mode::Bms: return "bms";
        case Mode::DigitalTwin: return "digital-twin";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
    if (s == "people") return Mode::People;
    if (s == "bms") return Mode::Bms;
    if (s == "digital-twin") return Mode::DigitalTwin;
    return std::nullopt;
}

struct BuildOptions {
    std::string occ_namespace = kOccNsDefault;  // occupant-extension IRIs are overridable
};

namespace detail {

inline BrickClass sensor_class(ifc::PointKind k) {
    switch (k) {
        case ifc::PointKind::Co2Sensor: return BrickClass::Co2Sensor;
        case ifc::PointKind::TemperatureSensor: return BrickClass::TemperatureSensor;
        case ifc::PointKind::HumiditySensor: return BrickClass::HumiditySensor;
    }
    return BrickClass::Co2Sensor;
}

inline BrickClass equipment_class(ifc::EquipmentKind k) {
    switch (k) {
        case ifc::EquipmentKind::Vav: return BrickClass::Vav;
        case ifc::EquipmentKind::Fcu: return BrickClass::Fcu;
        case ifc::EquipmentKind::Thermostat: return BrickClass::Thermostat;
        case ifc::EquipmentKind::AirTerminal: return BrickClass::TerminalUnit;
    }
    return BrickClass::Vav;
}

// Deterministic IRI minting over the full element universe. Locals are
// <sanitized-name>_<sourceId-suffix>; a collision falls back to the full
// sourceId, then to a numeric tie-breaker. Minting covers every element
// regardless of mode so that the three modes agree on shared IRIs.
class IriMinter {
public:
    explicit IriMinter(std::string ns) : ns_(std::move(ns)) {}

    const std::string& mint(const std::string& name, const std::string& source_id) {
        auto it = by_source_.find(source_id);
        if (it != by_source_.end()) return it->second;
        const std::string base = sanitize_local(name.empty() ? source_id : name);
        const std::string id_part = sanitize_local(source_id);
        std::string local = base;
        if (base != id_part) {
            const std::size_t n = std::min<std::size_t>(4, id_part.size());
            local = base + "_" + id_part.substr(id_part.size() - n);
        }
        if (taken_.count(local)) local = base + "_" + id_part;
        for (int i = 2; taken_.count(local); ++i) local = base + "_" + id_part + "_" + std::to_string(i);
        taken_.insert(local);
        return by_source_.emplace(source_id, ns_ + local).first->second;
    }

    const std::string& iri_for(const std::string& source_id) const {
        return by_source_.at(source_id);
    }
    bool has(const std::string& source_id) const { return by_source_.count(source_id) != 0; }

private:
    std::string ns_;
    std::set<std::string> taken_;
    std::map<std::string, std::string> by_source_;
};

}  // namespace detail

// synthesized source ids for sensor points hang off their host equipment
inline std::string sensor_source_id(const std::string& equipment_source_id, std::size_t index) {
    return equipment_source_id + "/pt" + std::to_string(index);
}

// Builds the BRICK graph for one mode. `relations` carries the inferred
// containment/feeds/controls/occupancy links; zone membership comes from the
// model itself. Occupants should already be validated (filter_defined).
inline BrickGraph build_graph(const ifc::BuildingModel& model, const infer::RelationSet& relations,
                              const occ::OccupantSet& occupants, Mode mode,
                              const BuildOptions& options = {}) {
    if (model.building_source_id.empty()) throw EmptyModel();

    const bool want_people = mode == Mode::People || mode == Mode::DigitalTwin;
    const bool want_bms = mode == Mode::Bms || mode == Mode::DigitalTwin;

    const std::string bldg_ns = "urn:bim2brick:" + sanitize_local(model.building_name) + "#";
    const std::string src_pred = std::string(kToolNs) + "sourceId";
    const std::string tsid_pred = std::string(kToolNs) + "timeseriesId";
    const std::string panel_pred = std::string(kToolNs) + "masterPanel";
    const std::string age_pred = options.occ_namespace + "age";
    const std::string gender_pred = options.occ_namespace + "gender";

    // mint over the full universe in a fixed order so every mode agrees
    detail::IriMinter minter(bldg_ns);
    minter.mint(model.building_name, model.building_source_id);
    for (const auto& l : model.levels) minter.mint(l.name, l.source_id);
    for (const auto& r : model.rooms) minter.mint(r.name, r.source_id);
    for (const auto& z : model.zones) minter.mint(z.name, z.source_id);
    for (const auto& e : model.equipment) {
        minter.mint(e.name, e.source_id);
        for (std::size_t i = 0; i < e.bms.points.size(); ++i)
            minter.mint(e.name + "_" + to_string(e.bms.points[i].point_kind),
                        sensor_source_id(e.source_id, i));
    }
    for (const auto& o : occupants.occupants) minter.mint(o.subject_id, o.subject_id);

    BrickGraph g;
    g.prefixes = {
        {"b2b", kToolNs},   {"bldg", bldg_ns}, {"brick", kBrickNs},
        {"occ", options.occ_namespace}, {"rdf", kRdfNs},  {"rdfs", kRdfsNs},
    };

    auto emit_node = [&](const std::string& source_id, BrickClass cls, const std::string& label) {
        const std::string& iri = minter.iri_for(source_id);
        g.add(iri, kRdfType, RdfObject::iri(class_iri(cls, options.occ_namespace)));
        g.add(iri, src_pred, RdfObject::str(source_id));
        if (!label.empty()) g.add(iri, kRdfsLabel, RdfObject::str(label));
    };

    // spatial skeleton: every mode carries it
    emit_node(model.building_source_id, BrickClass::Building, model.building_name);
    for (const auto& l : model.levels) {
        emit_node(l.source_id, BrickClass::Floor, l.name);
        g.add(minter.iri_for(model.building_source_id), rel_iri(BrickRel::HasPart),
              RdfObject::iri(minter.iri_for(l.source_id)));
    }
    for (const auto& r : model.rooms) {
        emit_node(r.source_id, BrickClass::Room, r.name);
        if (minter.has(r.level_ref) && model.level_by_source(r.level_ref))
            g.add(minter.iri_for(r.level_ref), rel_iri(BrickRel::HasPart),
                  RdfObject::iri(minter.iri_for(r.source_id)));
    }
    for (const auto& z : model.zones) {
        emit_node(z.source_id, BrickClass::HvacZone, z.name);
        for (const auto& room : z.room_refs)
            if (minter.has(room))
                g.add(minter.iri_for(z.source_id), rel_iri(BrickRel::HasPart),
                      RdfObject::iri(minter.iri_for(room)));
    }

    if (want_people) {
        for (const auto& o : occupants.occupants) {
            emit_node(o.subject_id, BrickClass::Individual, "");
            const std::string& iri = minter.iri_for(o.subject_id);
            if (o.age) g.add(iri, age_pred, RdfObject::integer(*o.age));
            if (o.gender) g.add(iri, gender_pred, RdfObject::str(*o.gender));
        }
        for (const auto& rel : relations) {
            if (rel.kind != infer::RelKind::OccupantInRoom) continue;
            if (!minter.has(rel.subject) || !minter.has(rel.object)) continue;
            if (!occupants.by_subject(rel.subject)) continue;
            g.add(minter.iri_for(rel.subject), rel_iri(BrickRel::HasLocation),
                  RdfObject::iri(minter.iri_for(rel.object)));
        }
    }

    if (want_bms) {
        for (const auto& e : model.equipment) {
            emit_node(e.source_id, detail::equipment_class(e.kind), e.name);
            const std::string& iri = minter.iri_for(e.source_id);
            if (e.bms.timeseries_id) g.add(iri, tsid_pred, RdfObject::str(*e.bms.timeseries_id));
            if (e.bms.master_panel) g.add(iri, panel_pred, RdfObject::str(*e.bms.master_panel));
            for (std::size_t i = 0; i < e.bms.points.size(); ++i) {
                const std::string sensor_src = sensor_source_id(e.source_id, i);
                emit_node(sensor_src, detail::sensor_class(e.bms.points[i].point_kind), "");
                g.add(iri, rel_iri(BrickRel::HasPoint), RdfObject::iri(minter.iri_for(sensor_src)));
                if (!e.bms.points[i].timeseries_id.empty())
                    g.add(minter.iri_for(sensor_src), tsid_pred,
                          RdfObject::str(e.bms.points[i].timeseries_id));
            }
        }
        for (const auto& rel : relations) {
            if (!minter.has(rel.subject) || !minter.has(rel.object)) continue;
            switch (rel.kind) {
                case infer::RelKind::EquipmentInRoom:
                    g.add(minter.iri_for(rel.subject), rel_iri(BrickRel::HasLocation),
                          RdfObject::iri(minter.iri_for(rel.object)));
                    break;
                case infer::RelKind::FeedsZone:
                    g.add(minter.iri_for(rel.subject), rel_iri(BrickRel::Feeds),
                          RdfObject::iri(minter.iri_for(rel.object)));
                    break;
                case infer::RelKind::Controls:
                    // no controls predicate in core BRICK: modeled as feeds
                    g.add(minter.iri_for(rel.subject), rel_iri(BrickRel::Feeds),
                          RdfObject::iri(minter.iri_for(rel.object)));
                    break;
                default: break;
            }
        }
    }

    g.canonicalize();
    return g;
}

}  // namespace bim2brick::brick

#endif
