#ifndef BIM2BRICK_INFERENCE_HPP
#define BIM2BRICK_INFERENCE_HPP

// Derives the implicit relationships in a building model: point-in-room
// containment for equipment and occupants, zone membership, duct-network
// feeds chains, and thermostat control links.

#include <bim2brick/diagnostics.hpp>
#include <bim2brick/ifc_model.hpp>
#include <bim2brick/occupants.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bim2brick::infer {

enum class RelKind { EquipmentInRoom, OccupantInRoom, RoomInZone, FeedsZone, Controls };

inline const char* to_string(RelKind k) {
    switch (k) {
        case RelKind::EquipmentInRoom: return "equipment_in_room";
        case RelKind::OccupantInRoom: return "occupant_in_room";
        case RelKind::RoomInZone: return "room_in_zone";
        case RelKind::FeedsZone: return "feeds_zone";
        case RelKind::Controls: return "controls";
    }
    return "?";
}

struct Relation {
    std::string subject;
    RelKind kind = RelKind::EquipmentInRoom;
    std::string object;

    friend bool operator==(const Relation&, const Relation&) = default;
    friend bool operator<(const Relation& a, const Relation& b) {
        if (a.subject != b.subject) return a.subject < b.subject;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.object < b.object;
    }
};

using RelationSet = std::vector<Relation>;

// canonical order: (subject, kind, object), duplicates removed
inline void canonicalize(RelationSet& rels) {
    std::sort(rels.begin(), rels.end());
    rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
}

inline const Relation* find_relation(const RelationSet& rels, const std::string& subject,
                                     RelKind kind) {
    for (const auto& r : rels)
        if (r.kind == kind && r.subject == subject) return &r;
    return nullptr;
}

// ---- point-in-polygon -------------------------------------------------------

// boundary-inclusive even-odd test; points within kBoundaryEps of an edge
// count as inside
inline constexpr double kBoundaryEps = 1e-9;

inline bool point_on_segment(double ax, double ay, double bx, double by, double px, double py,
                             double eps = kBoundaryEps) {
    const double abx = bx - ax, aby = by - ay;
    const double apx = px - ax, apy = py - ay;
    const double len2 = abx * abx + aby * aby;
    if (len2 < eps * eps) {  // degenerate edge: compare to the vertex
        return std::hypot(apx, apy) <= eps;
    }
    double t = (apx * abx + apy * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = apx - t * abx, dy = apy - t * aby;
    return std::hypot(dx, dy) <= eps;
}

inline bool point_in_polygon(const ifc::Polygon& poly, double px, double py) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (point_on_segment(poly[j][0], poly[j][1], poly[i][0], poly[i][1], px, py)) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > py) != (yj > py)) {
            const double x_at = (xj - xi) * (py - yi) / (yj - yi) + xi;
            if (px < x_at) inside = !inside;
        }
    }
    return inside;
}

// ---- containment index ------------------------------------------------------

struct ContainmentIndex {
    struct RoomEntry {
        std::string room_ref;
        const ifc::Polygon* footprint = nullptr;
    };
    struct LevelBand {
        std::string level_ref;
        double z_min = 0;
        std::optional<double> z_max;  // unset on the top band
        std::vector<RoomEntry> rooms;
    };
    std::vector<LevelBand> bands;  // ascending z_min
};

// Builds the z-banded room index. Rooms without footprints are omitted (they
// can never win a containment query); footprint storage stays in the model.
inline ContainmentIndex make_containment_index(const ifc::BuildingModel& model) {
    ContainmentIndex index;
    for (std::size_t i = 0; i < model.levels.size(); ++i) {
        ContainmentIndex::LevelBand band;
        band.level_ref = model.levels[i].source_id;
        band.z_min = model.levels[i].elevation;
        if (i + 1 < model.levels.size()) band.z_max = model.levels[i + 1].elevation;
        index.bands.push_back(std::move(band));
    }
    for (const auto& room : model.rooms) {
        if (!room.has_footprint()) continue;
        for (auto& band : index.bands) {
            if (band.level_ref == room.level_ref) {
                band.rooms.push_back({room.source_id, &room.footprint});
                break;
            }
        }
    }
    return index;
}

// The room containing (x,y,z): z picks the level band, (x,y) the footprint.
// Boundary points are inside; on overlap the smaller source_id wins with a
// diagnostic. None when nothing claims the point.
inline std::optional<std::string> locate(const ContainmentIndex& index, double x, double y,
                                         double z, Diagnostics* diags = nullptr) {
    const ContainmentIndex::LevelBand* band = nullptr;
    for (const auto& b : index.bands) {
        if (z >= b.z_min && (!b.z_max || z < *b.z_max)) {
            band = &b;
            break;
        }
    }
    if (!band) return std::nullopt;
    std::vector<const std::string*> hits;
    for (const auto& entry : band->rooms)
        if (point_in_polygon(*entry.footprint, x, y)) hits.push_back(&entry.room_ref);
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
    if (hits.size() > 1 && diags)
        add_diag(*diags, "overlapping-rooms", Severity::Warning, *hits.front(),
                 "point is claimed by " + std::to_string(hits.size()) +
                     " overlapping rooms; smallest source_id wins");
    return *hits.front();
}

struct InferResult {
    RelationSet relations;
    Diagnostics diagnostics;
};

// ---- zone membership --------------------------------------------------------

inline RelationSet zone_memberships(const ifc::BuildingModel& model) {
    RelationSet rels;
    for (const auto& zone : model.zones)
        for (const auto& room : zone.room_refs) rels.push_back({room, RelKind::RoomInZone, zone.source_id});
    canonicalize(rels);
    return rels;
}

// ---- equipment containment --------------------------------------------------

// Room assignment per equipment item: an explicit HostingRoom override
// (matched as room source_id, then room name) beats the placement point.
inline InferResult infer_equipment_rooms(const ifc::BuildingModel& model,
                                         const ContainmentIndex& index) {
    InferResult out;
    for (const auto& eq : model.equipment) {
        if (eq.bms.hosting_room) {
            const ifc::Room* room = model.room_by_source(*eq.bms.hosting_room);
            if (!room) room = model.room_by_name(*eq.bms.hosting_room);
            if (!room) {
                add_diag(out.diagnostics, "unknown-hosting-room", Severity::Warning, eq.source_id,
                         std::string(ifc::to_string(eq.kind)) + " '" + eq.name +
                             "' names hosting room '" + *eq.bms.hosting_room +
                             "' which matches no room; no containment emitted");
                continue;
            }
            out.relations.push_back({eq.source_id, RelKind::EquipmentInRoom, room->source_id});
            continue;
        }
        if (!eq.placement_point) {
            add_diag(out.diagnostics, "unlocated-equipment", Severity::Warning, eq.source_id,
                     std::string(ifc::to_string(eq.kind)) + " '" + eq.name +
                         "' has no placement point and no hosting room");
            continue;
        }
        const auto& p = *eq.placement_point;
        auto room = locate(index, p.x, p.y, p.z, &out.diagnostics);
        if (!room) {
            add_diag(out.diagnostics, "unlocated-equipment", Severity::Warning, eq.source_id,
                     std::string(ifc::to_string(eq.kind)) + " '" + eq.name +
                         "' placement point lies outside every room footprint");
            continue;
        }
        out.relations.push_back({eq.source_id, RelKind::EquipmentInRoom, *room});
    }
    canonicalize(out.relations);
    return out;
}

// ---- duct-network feeds -----------------------------------------------------

// Breadth-first reachability from each VAV/FCU across connected ports and
// through duct segments to air terminals; each terminal's room's zones
// receive a feeds_zone relation. Flow direction, when present, constrains
// only the ports leaving the starting equipment.
inline InferResult infer_feeds(const ifc::BuildingModel& model, const RelationSet& equipment_rooms) {
    InferResult out;

    std::map<std::string, const ifc::Port*> port_by_id;
    for (const auto& p : model.ports) port_by_id.emplace(p.source_id, &p);

    std::map<std::string, const ifc::Duct*> duct_by_id;
    for (const auto& d : model.ducts) duct_by_id.emplace(d.source_id, &d);

    std::map<std::string, const ifc::Equipment*> equip_by_id;
    for (const auto& e : model.equipment) equip_by_id.emplace(e.source_id, &e);

    // room -> zones, via the model's zone membership lists
    std::map<std::string, std::vector<std::string>> room_zones;
    for (const auto& z : model.zones)
        for (const auto& r : z.room_refs) room_zones[r].push_back(z.source_id);

    std::map<std::string, std::string> equipment_room;
    for (const auto& rel : equipment_rooms)
        if (rel.kind == RelKind::EquipmentInRoom) equipment_room.emplace(rel.subject, rel.object);

    std::set<std::string> terminals_without_room_reported;

    for (const auto& eq : model.equipment) {
        if (eq.kind != ifc::EquipmentKind::Vav && eq.kind != ifc::EquipmentKind::Fcu) continue;

        std::deque<const ifc::Port*> frontier;
        std::set<std::string> visited_ports;
        for (const auto& pr : eq.port_refs) {
            auto it = port_by_id.find(pr);
            if (it == port_by_id.end()) continue;
            // leave equipment only via source/bidirectional ports when flow is set
            if (it->second->flow_direction && *it->second->flow_direction == ifc::FlowDirection::Sink)
                continue;
            if (visited_ports.insert(pr).second) frontier.push_back(it->second);
        }

        std::set<std::string> reached_terminals;
        while (!frontier.empty()) {
            const ifc::Port* port = frontier.front();
            frontier.pop_front();
            if (!port->connected_to) continue;
            auto peer_it = port_by_id.find(*port->connected_to);
            if (peer_it == port_by_id.end()) continue;
            const ifc::Port* peer = peer_it->second;
            if (!visited_ports.insert(peer->source_id).second) continue;
            if (peer->owner_ref.empty()) continue;

            if (auto dit = duct_by_id.find(peer->owner_ref); dit != duct_by_id.end()) {
                // pass through the duct and out of its other ports
                for (const auto& other : dit->second->port_refs) {
                    if (other == peer->source_id) continue;
                    auto oit = port_by_id.find(other);
                    if (oit == port_by_id.end()) continue;
                    if (visited_ports.insert(other).second) frontier.push_back(oit->second);
                }
                continue;
            }
            if (auto eit = equip_by_id.find(peer->owner_ref); eit != equip_by_id.end()) {
                // equipment terminates the branch; record air terminals
                if (eit->second->kind == ifc::EquipmentKind::AirTerminal)
                    reached_terminals.insert(eit->second->source_id);
            }
        }

        for (const auto& term : reached_terminals) {
            auto rit = equipment_room.find(term);
            if (rit == equipment_room.end()) {
                if (terminals_without_room_reported.insert(term).second)
                    add_diag(out.diagnostics, "terminal-outside-rooms", Severity::Notice, term,
                             "air terminal is in no room; it cannot contribute feeds relations");
                continue;
            }
            auto zit = room_zones.find(rit->second);
            if (zit == room_zones.end()) continue;  // room in no zone
            for (const auto& zone : zit->second)
                out.relations.push_back({eq.source_id, RelKind::FeedsZone, zone});
        }
    }
    canonicalize(out.relations);
    return out;
}

// Convenience overload: resolves terminal rooms internally.
inline InferResult infer_feeds(const ifc::BuildingModel& model) {
    const ContainmentIndex index = make_containment_index(model);
    InferResult rooms = infer_equipment_rooms(model, index);
    InferResult out = infer_feeds(model, rooms.relations);
    return out;
}

// ---- thermostat control links -----------------------------------------------

// Each located thermostat controls the VAV/FCU set serving its room:
// same-room equipment when any exists, otherwise equipment feeding a zone the
// room belongs to. An explicit ControlsIdentifier replaces inference.
inline InferResult infer_controls(const ifc::BuildingModel& model,
                                  const RelationSet& equipment_rooms, const RelationSet& feeds) {
    InferResult out;

    std::map<std::string, std::string> equipment_room;
    std::map<std::string, std::vector<std::string>> room_equipment;  // room -> VAV/FCU list
    for (const auto& rel : equipment_rooms) {
        if (rel.kind != RelKind::EquipmentInRoom) continue;
        equipment_room.emplace(rel.subject, rel.object);
        const ifc::Equipment* eq = model.equipment_by_source(rel.subject);
        if (eq && (eq->kind == ifc::EquipmentKind::Vav || eq->kind == ifc::EquipmentKind::Fcu))
            room_equipment[rel.object].push_back(rel.subject);
    }

    std::map<std::string, std::vector<std::string>> zone_feeders;  // zone -> equipment
    for (const auto& rel : feeds)
        if (rel.kind == RelKind::FeedsZone) zone_feeders[rel.object].push_back(rel.subject);

    std::map<std::string, std::string> by_identifier;  // bms identifier -> equipment src
    for (const auto& e : model.equipment)
        if (e.bms.identifier) by_identifier.emplace(*e.bms.identifier, e.source_id);

    for (const auto& thermo : model.equipment) {
        if (thermo.kind != ifc::EquipmentKind::Thermostat) continue;

        std::vector<std::string> targets;
        if (thermo.bms.controls_identifier) {
            auto it = by_identifier.find(*thermo.bms.controls_identifier);
            if (it == by_identifier.end()) {
                add_diag(out.diagnostics, "unknown-controls-identifier", Severity::Warning,
                         thermo.source_id,
                         "thermostat names controlled identifier '" + *thermo.bms.controls_identifier +
                             "' which matches no equipment");
                continue;  // explicit link replaces inference even when broken
            }
            targets.push_back(it->second);
        } else {
            auto rit = equipment_room.find(thermo.source_id);
            if (rit == equipment_room.end()) continue;  // unlocated thermostat, already diagnosed
            const std::string& room = rit->second;
            if (auto sit = room_equipment.find(room); sit != room_equipment.end())
                targets = sit->second;
            if (targets.empty()) {
                const ifc::BuildingModel& m = model;
                for (const auto* zone : m.zones_of_room(room)) {
                    auto zit = zone_feeders.find(zone->source_id);
                    if (zit == zone_feeders.end()) continue;
                    targets.insert(targets.end(), zit->second.begin(), zit->second.end());
                }
            }
        }
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        if (targets.size() > 3)
            add_diag(out.diagnostics, "ambiguous-control", Severity::Warning, thermo.source_id,
                     "thermostat '" + thermo.name + "' matches " + std::to_string(targets.size()) +
                         " equipment items; relations emitted anyway");
        for (const auto& t : targets) out.relations.push_back({thermo.source_id, RelKind::Controls, t});
    }
    canonicalize(out.relations);
    return out;
}

inline InferResult infer_controls(const ifc::BuildingModel& model,
                                  const RelationSet& equipment_rooms) {
    return infer_controls(model, equipment_rooms, infer_feeds(model, equipment_rooms).relations);
}

// ---- occupant containment ---------------------------------------------------

// One relation per occupant whose as-of sample lands inside a room.
// Expects localize_all to have run (samples carry local coordinates).
inline InferResult infer_occupant_rooms(const occ::OccupantSet& records,
                                        const ContainmentIndex& index,
                                        std::optional<std::int64_t> as_of_ms = std::nullopt) {
    InferResult out;
    for (const auto& rec : records.occupants) {
        const occ::OccupantSample* sample = occ::sample_at(rec, as_of_ms);
        if (!sample) {
            add_diag(out.diagnostics, "no-sample", Severity::Notice, rec.subject_id,
                     "occupant has no sample at or before the requested instant");
            continue;
        }
        if (!sample->local) {
            add_diag(out.diagnostics, "not-localized", Severity::Warning, rec.subject_id,
                     "selected sample lacks building-local coordinates");
            continue;
        }
        auto room = locate(index, sample->local->x, sample->local->y, sample->local->z,
                           &out.diagnostics);
        if (!room) {
            add_diag(out.diagnostics, "occupant-outside-rooms", Severity::Notice, rec.subject_id,
                     "selected sample lies outside every room footprint");
            continue;
        }
        out.relations.push_back({rec.subject_id, RelKind::OccupantInRoom, *room});
    }
    canonicalize(out.relations);
    return out;
}

}  // namespace bim2brick::infer

#endif
