#ifndef TESTS_SUPPORT_FIXTURES_HPP
#define TESTS_SUPPORT_FIXTURES_HPP

// Synthetic building fixtures. The flagship one mirrors a mid-size academic
// building: 9 storeys, 48 rooms/zones, 52 VAVs + 16 FCUs with duct runs to
// air terminals, and a 30-subject occupant survey of which 17 are complete.

#include "ifc_builder.hpp"

#include <bim2brick/brick_graph.hpp>
#include <bim2brick/geo_transform.hpp>
#include <bim2brick/occupants.hpp>

#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace fixtures {

struct Sde4Spec {
    int storeys = 9;
    std::vector<int> rooms_per_storey = {6, 6, 6, 5, 5, 5, 5, 5, 5};  // sums to 48
    int vavs = 52;
    int fcus_one_sensor = 14;
    int fcus_two_sensors = 2;
    int csv_subjects = 30;
    int valid_subjects = 17;

    double storey_height = 4.0;
    double room_w = 10.0, room_d = 8.0, room_pitch = 12.0;

    double origin_lat = 1.2966, origin_lon = 103.7764, origin_alt = 10.0;
    double rotation_deg = 15.0, scale = 1.0;

    int total_rooms() const {
        return std::accumulate(rooms_per_storey.begin(), rooms_per_storey.end(), 0);
    }
    int total_powered() const { return vavs + fcus_one_sensor + fcus_two_sensors; }
};

struct Sde4Fixture {
    Sde4Spec spec;
    std::string step_text;
    std::string csv_text;

    // source ids for bijection checks, grouped by selection category
    std::vector<std::string> skeleton_ids;   // building + levels + rooms + zones
    std::vector<std::string> equipment_ids;  // VAVs, FCUs, air terminals
    std::vector<std::string> sensor_ids;     // synthesized point ids
    std::vector<std::string> valid_subject_ids;
};

struct ExpectedCounts {
    std::map<std::string, std::size_t> nodes_by_class;
    std::map<std::string, std::size_t> relations_by_kind;
    std::size_t instances = 0;
};

// Closed-form counting oracle: node and relation totals derived from the
// fixture parameters alone, never from the code under test.
inline ExpectedCounts sde4_expected(const Sde4Spec& s, bim2brick::brick::Mode mode) {
    using bim2brick::brick::Mode;
    ExpectedCounts e;
    const std::size_t rooms = static_cast<std::size_t>(s.total_rooms());
    const std::size_t zones = rooms;
    const std::size_t powered = static_cast<std::size_t>(s.total_powered());

    e.nodes_by_class["Building"] = 1;
    e.nodes_by_class["Floor"] = static_cast<std::size_t>(s.storeys);
    e.nodes_by_class["Room"] = rooms;
    e.nodes_by_class["HVAC_Zone"] = zones;
    e.relations_by_kind["hasPart"] = static_cast<std::size_t>(s.storeys) + rooms + rooms;

    if (mode != Mode::Bms) {
        e.nodes_by_class["Individual"] = static_cast<std::size_t>(s.valid_subjects);
        e.relations_by_kind["hasLocation"] += static_cast<std::size_t>(s.valid_subjects);
    }
    if (mode != Mode::People) {
        e.nodes_by_class["Variable_Air_Volume_Box"] = static_cast<std::size_t>(s.vavs);
        e.nodes_by_class["Fan_Coil_Unit"] =
            static_cast<std::size_t>(s.fcus_one_sensor + s.fcus_two_sensors);
        e.nodes_by_class["Terminal_Unit"] = powered;  // one terminal per powered unit
        e.nodes_by_class["CO2_Sensor"] = static_cast<std::size_t>(s.vavs + s.fcus_two_sensors);
        e.nodes_by_class["Temperature_Sensor"] =
            static_cast<std::size_t>(s.vavs + s.fcus_one_sensor + s.fcus_two_sensors);
        e.nodes_by_class["Humidity_Sensor"] = static_cast<std::size_t>(s.vavs);
        // every equipment item (powered + terminal) sits in a room
        e.relations_by_kind["hasLocation"] += powered * 2;
        e.relations_by_kind["feeds"] = powered;  // each unit feeds its room's single zone
        e.relations_by_kind["hasPoint"] = e.nodes_by_class["CO2_Sensor"] +
                                          e.nodes_by_class["Temperature_Sensor"] +
                                          e.nodes_by_class["Humidity_Sensor"];
    }
    for (const auto& [cls, n] : e.nodes_by_class) e.instances += n;
    return e;
}

// inverse of the site projection: building-local -> WGS84
inline bim2brick::geo::GeoSample latlon_for_local(const Sde4Spec& s, double x, double y, double z) {
    namespace geo = bim2brick::geo;
    const geo::SiteTransform site =
        geo::make_site_transform(s.origin_lat, s.origin_lon, s.origin_alt, s.rotation_deg, s.scale);
    const double theta = site.rotation_deg * 3.14159265358979323846 / 180.0;
    const double ca = std::cos(theta), sa = std::sin(theta);
    geo::UtmCoord utm = site.origin;
    utm.easting += (ca * x + sa * y) / site.scale;
    utm.northing += (-sa * x + ca * y) / site.scale;
    return geo::utm_to_wgs84(utm, site.origin_altitude + z / site.scale);
}

namespace detail {

struct RoomSlot {
    int storey = 0;
    int index = 0;
    double ox = 0;  // world-x of the room's west wall
    double z = 0;   // storey elevation
};

inline std::string fmt(double v, int digits = 9) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

inline Sde4Fixture make_sde4_fixture(const Sde4Spec& spec = {}) {
    using namespace ifcbuild;
    Sde4Fixture fx;
    fx.spec = spec;

    IfcWriter w;
    std::uint64_t gid_seed = 1000;
    auto gid = [&] { return global_id(gid_seed++); };

    w.add_units();  // metres

    const std::string building_gid = gid();
    const std::int64_t bld = w.building(building_gid, "SDE4");
    fx.skeleton_ids.push_back(building_gid);

    // storeys, rooms, zones
    std::vector<std::int64_t> storey_ents;
    std::vector<std::int64_t> room_ents;
    std::vector<detail::RoomSlot> slots;
    std::vector<std::string> zone_gids, room_gids;

    for (int s = 0; s < spec.storeys; ++s) {
        const double z = s * spec.storey_height;
        const std::string sg = gid();
        const std::int64_t pl = w.placement_at(0, 0, z);
        const std::int64_t st = w.storey(sg, "Level " + std::to_string(s + 1), z, pl);
        storey_ents.push_back(st);
        fx.skeleton_ids.push_back(sg);

        std::vector<std::int64_t> spaces;
        for (int i = 0; i < spec.rooms_per_storey[static_cast<std::size_t>(s)]; ++i) {
            const double ox = i * spec.room_pitch;
            const std::string rg = gid();
            const std::int64_t sp_pl = w.placement_at(ox, 0, 0, pl);
            const std::int64_t shape =
                w.rect_solid_shape(spec.room_w, spec.room_d, spec.storey_height - 1.0);
            const std::int64_t sp = w.space(
                rg, "Room " + std::to_string(s + 1) + "." + std::to_string(i + 1), sp_pl, shape);
            spaces.push_back(sp);
            room_ents.push_back(sp);
            room_gids.push_back(rg);
            slots.push_back({s, i, ox, z});
            fx.skeleton_ids.push_back(rg);
        }
        w.aggregate(gid(), st, spaces);
    }

    w.aggregate(gid(), bld, storey_ents);

    for (std::size_t r = 0; r < room_ents.size(); ++r) {
        const std::string zg = gid();
        const std::int64_t zn =
            w.zone(zg, "Zone " + std::to_string(slots[r].storey + 1) + "." +
                           std::to_string(slots[r].index + 1));
        w.assign_to_group(gid(), zn, {room_ents[r]});
        zone_gids.push_back(zg);
        fx.skeleton_ids.push_back(zg);
    }

    // one powered unit = (equipment, duct, terminal) chain inside one room
    auto add_chain = [&](const std::string& kind, int n, std::size_t room_idx,
                         const std::string& points, const std::string& tsid) {
        const auto& slot = slots[room_idx];
        const double cx = slot.ox + spec.room_w / 2.0;
        const double cy = spec.room_d / 2.0;
        const double cz = slot.z + 1.5;

        const std::string eq_gid = gid();
        const std::string eq_name = kind + "-" + std::to_string(n);
        std::int64_t eq;
        if (kind == "VAV")
            eq = w.vav(eq_gid, eq_name, w.placement_at(cx, cy, cz));
        else
            eq = w.fcu(eq_gid, eq_name, w.placement_at(cx, cy, cz));
        fx.equipment_ids.push_back(eq_gid);

        const std::string duct_gid = gid();
        const std::int64_t duct = w.duct(duct_gid, "Duct-" + eq_name);

        const std::string term_gid = gid();
        const std::int64_t term =
            w.air_terminal(term_gid, "Diffuser-" + eq_name, w.placement_at(cx - 2.0, cy - 1.0, slot.z + 3.0));
        fx.equipment_ids.push_back(term_gid);

        const std::int64_t p_eq = w.port(gid(), w.placement_at(cx, cy, cz), "SOURCE");
        const std::int64_t p_d1 = w.port(gid(), std::nullopt, "NOTDEFINED");
        const std::int64_t p_d2 = w.port(gid(), std::nullopt, "NOTDEFINED");
        const std::int64_t p_tm = w.port(gid(), std::nullopt, "SINK");
        w.port_to_element(gid(), p_eq, eq);
        w.nests_ports(gid(), duct, {p_d1, p_d2});
        w.port_to_element(gid(), p_tm, term);
        w.connect_ports(gid(), p_eq, p_d1);
        w.connect_ports(gid(), p_d2, p_tm);

        std::vector<std::pair<std::string, std::string>> entries = {
            {"Identifier", eq_name},
            {"TimeSeriesId", tsid},
            {"MasterPanel", "MP-" + std::to_string(slot.storey + 1)},
            {"Points", points},
        };
        w.pset(gid(), eq, "BIM2BRICK", entries);

        // synthesized sensor ids mirror the production rule
        std::size_t idx = 0;
        for (std::size_t pos = 0; pos < points.size();) {
            auto semi = points.find(';', pos);
            if (semi == std::string::npos) semi = points.size();
            if (semi > pos) fx.sensor_ids.push_back(eq_gid + "/pt" + std::to_string(idx++));
            pos = semi + 1;
        }
    };

    int vav_no = 1;
    for (int v = 0; v < spec.vavs; ++v) {
        const std::size_t room_idx = static_cast<std::size_t>(v) % slots.size();
        const std::string t = "ts-vav-" + std::to_string(vav_no);
        add_chain("VAV", vav_no, room_idx,
                  "CO2_Sensor:" + t + "-co2;Temperature_Sensor:" + t + "-t;Humidity_Sensor:" + t +
                      "-rh",
                  t);
        ++vav_no;
    }
    int fcu_no = 1;
    for (int f = 0; f < spec.fcus_one_sensor; ++f) {
        const std::size_t room_idx = static_cast<std::size_t>(f * 3 + 1) % slots.size();
        const std::string t = "ts-fcu-" + std::to_string(fcu_no);
        add_chain("FCU", fcu_no, room_idx, "Temperature_Sensor:" + t + "-t", t);
        ++fcu_no;
    }
    for (int f = 0; f < spec.fcus_two_sensors; ++f) {
        const std::size_t room_idx = static_cast<std::size_t>(f * 5 + 2) % slots.size();
        const std::string t = "ts-fcu-" + std::to_string(fcu_no);
        add_chain("FCU", fcu_no, room_idx, "CO2_Sensor:" + t + "-co2;Temperature_Sensor:" + t + "-t",
                  t);
        ++fcu_no;
    }

    fx.step_text = w.step.finish();

    // ---- occupant CSV -------------------------------------------------------
    // 17 complete subjects with an in-room latest sample; 13 defective ones.
    std::string csv = "subject_id,age,gender,timestamp,latitude,longitude,altitude,note\n";
    const std::int64_t base_ms = *bim2brick::occ::parse_rfc3339_ms("2024-03-15T08:00:00Z");

    auto subject_name = [](int n) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "S%02d", n);
        return std::string(buf);
    };
    auto sample_row = [&](const std::string& subj, const std::string& age,
                          const std::string& gender, std::int64_t at_ms, double x, double y,
                          double z, const std::string& note) {
        const auto geo = latlon_for_local(spec, x, y, z);
        csv += subj + "," + age + "," + gender + "," + bim2brick::occ::format_rfc3339_utc(at_ms) +
               "," + detail::fmt(geo.latitude) + "," + detail::fmt(geo.longitude) + "," +
               detail::fmt(geo.altitude, 3) + "," + note + "\n";
    };

    for (int k = 0; k < spec.valid_subjects; ++k) {
        const std::string subj = subject_name(k + 1);
        const auto& slot = slots[static_cast<std::size_t>(k * 7) % slots.size()];
        const double x = slot.ox + 2.0 + 0.3 * k;
        const double y = 3.0 + 0.1 * k;
        const double z = slot.z + 1.2;
        const std::string age = std::to_string(23 + k);
        const std::string gender = k % 2 ? "F" : "M";
        if (k % 3 == 0) {
            // an earlier sample far outside the building: nearest-previous
            // selection must prefer the later, in-room one
            sample_row(subj, age, gender, base_ms + k * 60000 - 3600000, -500.0, -500.0, 0.0,
                       "\"commute, outdoors\"");
        }
        sample_row(subj, age, gender, base_ms + k * 60000, x, y, z, "desk");
    }

    int n = spec.valid_subjects + 1;
    for (int k = 0; k < 4 && n <= spec.csv_subjects; ++k, ++n)  // missing age
        sample_row(subject_name(n), "", "F", base_ms + n * 60000, 2.0, 2.0, 1.0, "no age");
    for (int k = 0; k < 4 && n <= spec.csv_subjects; ++k, ++n)  // missing gender
        sample_row(subject_name(n), "41", "", base_ms + n * 60000, 2.0, 2.0, 1.0, "no gender");
    for (int k = 0; k < 3 && n <= spec.csv_subjects; ++k, ++n) {  // no usable sample
        const std::string subj = subject_name(n);
        csv += subj + ",37,M,not-a-timestamp,1.0,103.0,0,bad ts\n";
        csv += subj + ",37,M,2024-03-15T09:00:00Z,91.5,999.0,0,bad coords\n";
    }
    for (int k = 0; k < 2 && n <= spec.csv_subjects; ++k, ++n)  // demographics only
        csv += subject_name(n) + ",52,F,,,,,no samples\n";

    fx.csv_text = csv;
    for (int k = 0; k < spec.valid_subjects; ++k) fx.valid_subject_ids.push_back(subject_name(k + 1));
    return fx;
}

// ---- a compact two-room fixture for unit and CLI tests ----------------------

struct TwoRoomFixture {
    std::string step_text;
    std::string building_gid, storey_gid;
    std::string room_a_gid, room_b_gid, zone_gid;
    std::string vav_gid, term_gid, thermo_gid;
};

// One storey; Room A [0,10]x[0,8], Room B [12,22]x[0,8]; one zone holding
// both rooms; a VAV in Room A ducted to a terminal in Room B; a thermostat
// in Room B.
inline TwoRoomFixture make_two_room_fixture() {
    using namespace ifcbuild;
    TwoRoomFixture fx;
    IfcWriter w;
    std::uint64_t seed = 5000;
    auto gid = [&] { return global_id(seed++); };

    w.add_units();
    fx.building_gid = gid();
    const std::int64_t bld = w.building(fx.building_gid, "Annex");
    fx.storey_gid = gid();
    const std::int64_t st_pl = w.placement_at(0, 0, 0);
    const std::int64_t st = w.storey(fx.storey_gid, "Ground", 0.0, st_pl);
    w.aggregate(gid(), bld, {st});

    fx.room_a_gid = gid();
    const std::int64_t room_a =
        w.space(fx.room_a_gid, "Room A", w.placement_at(0, 0, 0, st_pl), w.rect_solid_shape(10, 8, 3));
    fx.room_b_gid = gid();
    const std::int64_t room_b =
        w.space(fx.room_b_gid, "Room B", w.placement_at(12, 0, 0, st_pl), w.rect_solid_shape(10, 8, 3));
    w.aggregate(gid(), st, {room_a, room_b});

    fx.zone_gid = gid();
    const std::int64_t zone = w.zone(fx.zone_gid, "Zone AB");
    w.assign_to_group(gid(), zone, {room_a, room_b});

    fx.vav_gid = gid();
    const std::int64_t vav = w.vav(fx.vav_gid, "VAV-A", w.placement_at(5, 4, 1.5));
    fx.term_gid = gid();
    const std::int64_t term = w.air_terminal(fx.term_gid, "Diffuser-B", w.placement_at(17, 4, 2.5));
    const std::int64_t duct = w.duct(gid(), "Duct-AB");

    const std::int64_t p1 = w.port(gid(), std::nullopt, "SOURCE");
    const std::int64_t p2 = w.port(gid(), std::nullopt, "NOTDEFINED");
    const std::int64_t p3 = w.port(gid(), std::nullopt, "NOTDEFINED");
    const std::int64_t p4 = w.port(gid(), std::nullopt, "SINK");
    w.port_to_element(gid(), p1, vav);
    w.nests_ports(gid(), duct, {p2, p3});
    w.port_to_element(gid(), p4, term);
    w.connect_ports(gid(), p1, p2);
    w.connect_ports(gid(), p3, p4);

    w.pset(gid(), vav, "BIM2BRICK",
           {{"Identifier", "VAV-A"},
            {"TimeSeriesId", "ts-vav-a"},
            {"Points", "CO2_Sensor:ts-vav-a-co2;Temperature_Sensor:ts-vav-a-t"}});

    fx.thermo_gid = gid();
    w.thermostat(fx.thermo_gid, "Stat-B", w.placement_at(16, 2, 1.2));

    fx.step_text = w.step.finish();
    return fx;
}

}  // namespace fixtures

#endif
