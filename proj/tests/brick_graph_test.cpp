#include <bim2brick/brick_graph.hpp>

#include <bim2brick/geo_transform.hpp>
#include <bim2brick/ifc_model.hpp>
#include <bim2brick/inference.hpp>
#include <bim2brick/occupants.hpp>
#include <bim2brick/step_parser.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

using namespace bim2brick;
using brick::BrickClass;
using brick::BrickRel;
using brick::Mode;

namespace {

// everything build_graph consumes, derived from fixture text
struct Prepared {
    ifc::BuildingModel model;
    infer::RelationSet relations;
    occ::OccupantSet occupants;
};

Prepared prepare_two_room() {
    const auto fx = fixtures::make_two_room_fixture();
    Prepared p;
    p.model = ifc::extract_model(step::resolve_refs(step::parse_step(fx.step_text))).model;

    const auto index = infer::make_containment_index(p.model);
    auto rooms = infer::infer_equipment_rooms(p.model, index);
    auto feeds = infer::infer_feeds(p.model, rooms.relations);
    auto controls = infer::infer_controls(p.model, rooms.relations, feeds.relations);
    p.relations = rooms.relations;
    p.relations.insert(p.relations.end(), feeds.relations.begin(), feeds.relations.end());
    p.relations.insert(p.relations.end(), controls.relations.begin(), controls.relations.end());
    infer::canonicalize(p.relations);
    return p;
}

Prepared prepare_sde4(const fixtures::Sde4Fixture& fx) {
    Prepared p;
    p.model = ifc::extract_model(step::resolve_refs(step::parse_step(fx.step_text))).model;

    auto ingest = occ::ingest_occupants(fx.csv_text);
    const auto site =
        geo::make_site_transform(fx.spec.origin_lat, fx.spec.origin_lon, fx.spec.origin_alt,
                                 fx.spec.rotation_deg, fx.spec.scale);
    occ::localize_all(ingest.set, site);
    p.occupants = occ::filter_defined(ingest.set);

    const auto index = infer::make_containment_index(p.model);
    auto rooms = infer::infer_equipment_rooms(p.model, index);
    auto feeds = infer::infer_feeds(p.model, rooms.relations);
    auto controls = infer::infer_controls(p.model, rooms.relations, feeds.relations);
    auto occupant_rooms = infer::infer_occupant_rooms(p.occupants, index);
    p.relations = rooms.relations;
    p.relations.insert(p.relations.end(), feeds.relations.begin(), feeds.relations.end());
    p.relations.insert(p.relations.end(), controls.relations.begin(), controls.relations.end());
    p.relations.insert(p.relations.end(), occupant_rooms.relations.begin(),
                       occupant_rooms.relations.end());
    infer::canonicalize(p.relations);
    return p;
}

std::string iri_of(const brick::BrickGraph& g, const std::string& source_id) {
    for (const auto& [iri, src] : g.instances())
        if (src == source_id) return iri;
    return {};
}

bool has_triple(const brick::BrickGraph& g, const std::string& s, const std::string& p,
                const brick::RdfObject& o) {
    for (const auto& t : g.triples)
        if (t.subject == s && t.predicate == p && t.object == o) return true;
    return false;
}

}  // namespace

TEST_CASE("graph: subclass relation matches a closure oracle over the declared edges") {
    std::set<std::pair<std::string, std::string>> edges;
    for (BrickClass c : brick::kAllClasses)
        if (auto p = brick::parent_class(c))
            edges.insert({brick::class_local_name(c), brick::class_local_name(*p)});
    const auto closure = oracles::transitive_closure(edges);

    for (BrickClass a : brick::kAllClasses)
        for (BrickClass b : brick::kAllClasses) {
            const bool expected =
                a == b ||
                closure.count({brick::class_local_name(a), brick::class_local_name(b)}) > 0;
            CAPTURE(brick::class_local_name(a), brick::class_local_name(b));
            CHECK(brick::is_subclass_of(a, b) == expected);
        }

    // the closure itself is exactly the documented four edges
    const std::set<std::pair<std::string, std::string>> want = {
        {"Individual", "Occupant"},
        {"CO2_Sensor", "Point"},
        {"Temperature_Sensor", "Point"},
        {"Humidity_Sensor", "Point"},
    };
    CHECK(closure == want);
}

TEST_CASE("graph: class and relation IRIs") {
    CHECK(brick::class_iri(BrickClass::Room) == "https://brickschema.org/schema/Brick#Room");
    CHECK(brick::class_iri(BrickClass::Vav) ==
          "https://brickschema.org/schema/Brick#Variable_Air_Volume_Box");
    CHECK(brick::class_iri(BrickClass::HvacZone) ==
          "https://brickschema.org/schema/Brick#HVAC_Zone");
    CHECK(brick::class_iri(BrickClass::Individual) == "urn:bim2brick:occupant#Individual");
    CHECK(brick::class_iri(BrickClass::Occupant, "urn:x:custom#") == "urn:x:custom#Occupant");

    CHECK(brick::rel_iri(BrickRel::HasPart) == "https://brickschema.org/schema/Brick#hasPart");
    CHECK(brick::rel_iri(BrickRel::Feeds) == "https://brickschema.org/schema/Brick#feeds");
    for (BrickRel r : {BrickRel::HasPart, BrickRel::HasLocation, BrickRel::Feeds,
                       BrickRel::HasPoint, BrickRel::HasTag})
        CHECK(brick::inverse(brick::inverse(r)) == r);
    CHECK(brick::inverse(BrickRel::HasPart) == BrickRel::IsPartOf);
    CHECK(brick::inverse(BrickRel::Feeds) == BrickRel::IsFedBy);
}

TEST_CASE("graph: IRI local-name sanitization") {
    CHECK(brick::sanitize_local("Room 1.2") == "Room_1_2");
    CHECK(brick::sanitize_local("SDE4") == "SDE4");
    CHECK(brick::sanitize_local("3rd Floor") == "_3rd_Floor");
    CHECK(brick::sanitize_local("") == "_");
    CHECK(brick::sanitize_local("a$b/c") == "a_b_c");
}

TEST_CASE("graph: minting appends a source-id suffix and resolves collisions") {
    ifc::BuildingModel m;
    m.building_source_id = "HQ";  // name == id: no suffix
    m.building_name = "HQ";
    m.levels.push_back({"L1", "Ground", 0.0});
    // three rooms share a name and their ids sanitize identically
    ifc::Room r1, r2, r3, r4;
    r1.source_id = "A-1000";
    r1.name = "Lab";
    r1.level_ref = "L1";
    r2.source_id = "A.1000";
    r2.name = "Lab";
    r2.level_ref = "L1";
    r3.source_id = "A+1000";
    r3.name = "Lab";
    r3.level_ref = "L1";
    r4.source_id = "R9";
    r4.name = "";  // nameless: the id itself becomes the local
    r4.level_ref = "L1";
    m.rooms = {r1, r2, r3, r4};

    const auto g = brick::build_graph(m, {}, {}, Mode::Bms);
    CHECK(iri_of(g, "HQ") == "urn:bim2brick:HQ#HQ");
    CHECK(iri_of(g, "L1") == "urn:bim2brick:HQ#Ground_L1");
    CHECK(iri_of(g, "A-1000") == "urn:bim2brick:HQ#Lab_1000");
    CHECK(iri_of(g, "A.1000") == "urn:bim2brick:HQ#Lab_A_1000");
    CHECK(iri_of(g, "A+1000") == "urn:bim2brick:HQ#Lab_A_1000_2");
    CHECK(iri_of(g, "R9") == "urn:bim2brick:HQ#R9");
}

TEST_CASE("graph: an empty model is rejected") {
    CHECK_THROWS_AS(brick::build_graph({}, {}, {}, Mode::DigitalTwin), brick::EmptyModel);
}

TEST_CASE("graph: two-room BMS graph carries equipment, sensors, and annotations") {
    const auto p = prepare_two_room();
    const auto g = brick::build_graph(p.model, p.relations, p.occupants, Mode::Bms);

    const auto nodes = g.count_nodes_by_class();
    const std::map<std::string, std::size_t> want_nodes = {
        {"Building", 1}, {"Floor", 1},         {"Room", 2},
        {"HVAC_Zone", 1}, {"Variable_Air_Volume_Box", 1}, {"Terminal_Unit", 1},
        {"Thermostat", 1}, {"CO2_Sensor", 1},  {"Temperature_Sensor", 1},
    };
    CHECK(nodes == want_nodes);

    const auto rels = g.count_relations_by_kind();
    const std::map<std::string, std::size_t> want_rels = {
        {"hasPart", 5},      // building->floor, floor->2 rooms, zone->2 rooms
        {"hasLocation", 3},  // VAV, terminal, thermostat each in a room
        {"feeds", 2},        // VAV feeds the zone; thermostat modeled as feeding the VAV
        {"hasPoint", 2},
    };
    CHECK(rels == want_rels);

    // sensors hang off the VAV with synthesized ids and time-series annotations
    std::map<std::string, std::string> by_src;  // source -> iri
    for (const auto& [iri, src] : g.instances()) by_src[src] = iri;

    std::string vav_src, sensor0_src;
    for (const auto& [src, iri] : by_src)
        if (iri.find("VAV_A") != std::string::npos && src.find("/pt") == std::string::npos)
            vav_src = src;
    REQUIRE_FALSE(vav_src.empty());
    sensor0_src = brick::sensor_source_id(vav_src, 0);
    REQUIRE(by_src.count(sensor0_src));
    CHECK(g.type_of(by_src[sensor0_src]) ==
          std::optional<std::string>("https://brickschema.org/schema/Brick#CO2_Sensor"));
    CHECK(has_triple(g, by_src[vav_src], brick::rel_iri(BrickRel::HasPoint),
                     brick::RdfObject::iri(by_src[sensor0_src])));
    CHECK(has_triple(g, by_src[sensor0_src], std::string(brick::kToolNs) + "timeseriesId",
                     brick::RdfObject::str("ts-vav-a-co2")));
    CHECK(has_triple(g, by_src[vav_src], std::string(brick::kToolNs) + "timeseriesId",
                     brick::RdfObject::str("ts-vav-a")));
}

TEST_CASE("graph: people mode drops equipment; the modes share skeleton IRIs") {
    const auto p = prepare_two_room();
    const auto people = brick::build_graph(p.model, p.relations, p.occupants, Mode::People);
    const auto bms = brick::build_graph(p.model, p.relations, p.occupants, Mode::Bms);

    const auto nodes = people.count_nodes_by_class();
    const std::map<std::string, std::size_t> want_nodes = {
        {"Building", 1}, {"Floor", 1}, {"Room", 2}, {"HVAC_Zone", 1}};
    CHECK(nodes == want_nodes);
    CHECK(people.count_relations_by_kind() ==
          std::map<std::string, std::size_t>{{"hasPart", 5}});

    // skeleton instances mint identical IRIs in both modes
    for (const auto& [iri, src] : people.instances()) CHECK(iri_of(bms, src) == iri);
}

TEST_CASE("graph: digital twin equals the union of people and BMS triples") {
    const auto fx = fixtures::make_sde4_fixture();
    const auto p = prepare_sde4(fx);
    const auto people = brick::build_graph(p.model, p.relations, p.occupants, Mode::People);
    const auto bms = brick::build_graph(p.model, p.relations, p.occupants, Mode::Bms);
    const auto twin = brick::build_graph(p.model, p.relations, p.occupants, Mode::DigitalTwin);

    CHECK(people.prefixes == twin.prefixes);
    CHECK(bms.prefixes == twin.prefixes);
    CHECK(brick::triple_union(people.triples, bms.triples) == twin.triples);
}

TEST_CASE("graph: flagship-fixture counts match the closed-form oracle in every mode") {
    const auto fx = fixtures::make_sde4_fixture();
    const auto p = prepare_sde4(fx);
    for (Mode mode : {Mode::People, Mode::Bms, Mode::DigitalTwin}) {
        const auto g = brick::build_graph(p.model, p.relations, p.occupants, mode);
        const auto want = fixtures::sde4_expected(fx.spec, mode);
        CAPTURE(brick::to_string(mode));
        CHECK(g.count_nodes_by_class() == want.nodes_by_class);
        CHECK(g.count_relations_by_kind() == want.relations_by_kind);
        CHECK(g.instances().size() == want.instances);
    }
}

TEST_CASE("graph: every instance binds a distinct source id from the fixture universe") {
    const auto fx = fixtures::make_sde4_fixture();
    const auto p = prepare_sde4(fx);
    const auto g = brick::build_graph(p.model, p.relations, p.occupants, Mode::DigitalTwin);

    std::set<std::string> seen_src, seen_iri;
    for (const auto& [iri, src] : g.instances()) {
        CHECK(seen_src.insert(src).second);   // no source id twice
        CHECK(seen_iri.insert(iri).second);   // no IRI twice
    }

    std::set<std::string> expected;
    expected.insert(fx.skeleton_ids.begin(), fx.skeleton_ids.end());
    expected.insert(fx.equipment_ids.begin(), fx.equipment_ids.end());
    expected.insert(fx.sensor_ids.begin(), fx.sensor_ids.end());
    expected.insert(fx.valid_subject_ids.begin(), fx.valid_subject_ids.end());
    CHECK(seen_src == expected);
}

TEST_CASE("graph: occupants carry age and gender in the occupant namespace") {
    const auto fx = fixtures::make_sde4_fixture();
    const auto p = prepare_sde4(fx);
    const auto g = brick::build_graph(p.model, p.relations, p.occupants, Mode::People);

    const std::string s01 = iri_of(g, "S01");
    REQUIRE_FALSE(s01.empty());
    CHECK(g.type_of(s01) == std::optional<std::string>("urn:bim2brick:occupant#Individual"));
    CHECK(has_triple(g, s01, "urn:bim2brick:occupant#age", brick::RdfObject::integer(23)));
    CHECK(has_triple(g, s01, "urn:bim2brick:occupant#gender", brick::RdfObject::str("M")));

    // a custom extension namespace moves both the class and the predicates
    brick::BuildOptions opt;
    opt.occ_namespace = "https://example.org/people#";
    const auto g2 = brick::build_graph(p.model, p.relations, p.occupants, Mode::People, opt);
    const std::string s01b = iri_of(g2, "S01");
    CHECK(g2.type_of(s01b) ==
          std::optional<std::string>("https://example.org/people#Individual"));
    CHECK(has_triple(g2, s01b, "https://example.org/people#age", brick::RdfObject::integer(23)));
    bool default_ns_left = false;
    for (const auto& t : g2.triples)
        if (t.predicate.rfind("urn:bim2brick:occupant#", 0) == 0 ||
            (t.object.kind == brick::RdfObject::Kind::Iri &&
             t.object.text.rfind("urn:bim2brick:occupant#", 0) == 0))
            default_ns_left = true;
    CHECK_FALSE(default_ns_left);
}

TEST_CASE("graph: sensor source ids derive from their host equipment") {
    CHECK(brick::sensor_source_id("2abcXYZ", 0) == "2abcXYZ/pt0");
    CHECK(brick::sensor_source_id("2abcXYZ", 11) == "2abcXYZ/pt11");
}
