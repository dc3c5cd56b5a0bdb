#ifndef BIM2BRICK_IFC_MODEL_HPP
#define BIM2BRICK_IFC_MODEL_HPP

// Interprets a curated IFC entity subset out of a parsed STEP file into a
// typed building model: spatial hierarchy, HVAC zones, equipment, duct/port
// graph, room footprints and the BIM2BRICK property-set metadata.

#include <bim2brick/diagnostics.hpp>
#include <bim2brick/step_parser.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bim2brick::ifc {

class MissingBuilding : public Error {
public:
    MissingBuilding() : Error("model contains no IfcBuilding") {}
};

class UnsupportedRepresentation : public Error {
public:
    using Error::Error;
};

struct Point3 {
    double x = 0, y = 0, z = 0;
};

using Vertex2 = std::array<double, 2>;
using Polygon = std::vector<Vertex2>;  // simple, CCW, building-local meters

// signed area via the shoelace formula; positive for CCW
inline double signed_area(const Polygon& poly) {
    double acc = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    return acc / 2.0;
}

struct Level {
    std::string source_id;
    std::string name;
    double elevation = 0;  // meters, local Z
};

struct Room {
    std::string source_id;
    std::string name;
    std::string level_ref;  // source_id of the containing level
    Polygon footprint;      // empty when no usable boundary was found
    std::optional<double> height;

    bool has_footprint() const { return !footprint.empty(); }
};

struct HvacZone {
    std::string source_id;
    std::string name;
    std::vector<std::string> room_refs;  // distinct room source_ids
};

enum class EquipmentKind { Vav, Fcu, Thermostat, AirTerminal };

inline const char* to_string(EquipmentKind k) {
    switch (k) {
        case EquipmentKind::Vav: return "VAV";
        case EquipmentKind::Fcu: return "FCU";
        case EquipmentKind::Thermostat: return "Thermostat";
        case EquipmentKind::AirTerminal: return "AirTerminal";
    }
    return "?";
}

enum class PointKind { Co2Sensor, TemperatureSensor, HumiditySensor };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::Co2Sensor: return "CO2_Sensor";
        case PointKind::TemperatureSensor: return "Temperature_Sensor";
        case PointKind::HumiditySensor: return "Humidity_Sensor";
    }
    return "?";
}

inline std::optional<PointKind> parse_point_kind(std::string_view s) {
    if (s == "CO2_Sensor") return PointKind::Co2Sensor;
    if (s == "Temperature_Sensor") return PointKind::TemperatureSensor;
    if (s == "Humidity_Sensor") return PointKind::HumiditySensor;
    return std::nullopt;
}

struct PointSpec {
    PointKind point_kind = PointKind::Co2Sensor;
    std::string timeseries_id;  // empty when absent
};

// Custom BMS metadata carried by the "BIM2BRICK" property set.
struct BmsParams {
    std::optional<std::string> identifier;
    std::optional<std::string> hosting_room;  // room name or source_id override
    std::optional<std::string> timeseries_id;
    std::optional<std::string> master_panel;
    std::optional<std::string> controls_identifier;  // explicit thermostat->equipment link
    std::vector<PointSpec> points;
};

enum class FlowDirection { Source, Sink, Bidirectional };

struct Port {
    std::string source_id;
    std::string owner_ref;  // equipment or duct source_id; empty if unowned
    Point3 position;
    std::optional<FlowDirection> flow_direction;  // unset when NOTDEFINED
    std::optional<std::string> connected_to;      // symmetric
};

struct Equipment {
    std::string source_id;
    std::string name;
    EquipmentKind kind = EquipmentKind::Vav;
    std::optional<Point3> placement_point;  // room calculation point
    std::vector<std::string> port_refs;
    BmsParams bms;
};

struct Duct {
    std::string source_id;
    std::string name;
    std::vector<std::string> port_refs;
};

struct Pset {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

struct BuildingModel {
    std::string building_source_id;
    std::string building_name;
    std::vector<Level> levels;  // ordered by elevation
    std::vector<Room> rooms;
    std::vector<HvacZone> zones;
    std::vector<Equipment> equipment;  // VAV/FCU/Thermostat/AirTerminal
    std::vector<Duct> ducts;
    std::vector<Port> ports;
    std::map<std::string, std::vector<Pset>> psets;  // element source_id -> psets

    const Room* room_by_source(const std::string& src) const {
        for (const auto& r : rooms)
            if (r.source_id == src) return &r;
        return nullptr;
    }
    const Room* room_by_name(const std::string& name) const {
        for (const auto& r : rooms)
            if (r.name == name) return &r;
        return nullptr;
    }
    const Level* level_by_source(const std::string& src) const {
        for (const auto& l : levels)
            if (l.source_id == src) return &l;
        return nullptr;
    }
    const Equipment* equipment_by_source(const std::string& src) const {
        for (const auto& e : equipment)
            if (e.source_id == src) return &e;
        return nullptr;
    }
    const Port* port_by_source(const std::string& src) const {
        for (const auto& p : ports)
            if (p.source_id == src) return &p;
        return nullptr;
    }
    std::vector<const HvacZone*> zones_of_room(const std::string& room_src) const {
        std::vector<const HvacZone*> out;
        for (const auto& z : zones)
            for (const auto& rr : z.room_refs)
                if (rr == room_src) {
                    out.push_back(&z);
                    break;
                }
        return out;
    }
};

struct ExtractResult {
    BuildingModel model;
    Diagnostics diagnostics;
};

namespace detail {

// column-major-free tiny rigid transform: p' = R*p + t
struct Transform {
    std::array<std::array<double, 3>, 3> r{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Point3 t;

    Point3 apply(const Point3& p) const {
        return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t.x,
                r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t.y,
                r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t.z};
    }
    Transform compose(const Transform& local) const {
        Transform out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                out.r[i][j] = 0;
                for (int k = 0; k < 3; ++k) out.r[i][j] += r[i][k] * local.r[k][j];
            }
        out.t = apply(local.t);
        return out;
    }
};

inline Point3 cross(const Point3& a, const Point3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Point3 normalize(const Point3& v) {
    const double n = std::sqrt(dot(v, v));
    if (n < 1e-12) return {0, 0, 0};
    return {v.x / n, v.y / n, v.z / n};
}

inline std::string upper(std::string s) {
    for (char& c : s)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
    return s;
}

inline bool contains_ci(const std::string& haystack, const std::string& needle_upper) {
    return upper(haystack).find(needle_upper) != std::string::npos;
}

// safe positional accessors over entity args
inline const step::Value* arg_at(const step::Entity& e, std::size_t i) {
    return i < e.args.size() ? &e.args[i] : nullptr;
}

inline std::optional<std::string> string_arg(const step::Entity& e, std::size_t i) {
    const auto* v = arg_at(e, i);
    if (v && v->is_string()) return v->as_string();
    return std::nullopt;
}

inline std::optional<double> real_arg(const step::Entity& e, std::size_t i) {
    const auto* v = arg_at(e, i);
    if (v && (v->is_real() || v->is_int())) return v->as_real();
    return std::nullopt;
}

inline std::optional<std::int64_t> ref_arg(const step::Entity& e, std::size_t i) {
    const auto* v = arg_at(e, i);
    if (v && v->is_ref()) return v->ref_id();
    return std::nullopt;
}

inline std::optional<std::string> enum_arg(const step::Entity& e, std::size_t i) {
    const auto* v = arg_at(e, i);
    if (v && v->is_enum()) return v->as_enum().token;
    return std::nullopt;
}

// renders a property value (possibly a typed wrapper) as a plain string
inline std::string value_to_plain_string(const step::Value& v) {
    if (v.is_typed() && !v.as_typed().inner.empty())
        return value_to_plain_string(v.as_typed().inner.front());
    if (v.is_string()) return v.as_string();
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_real()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%g", v.as_real());
        return buf;
    }
    if (v.is_enum()) return v.as_enum().token;
    return {};
}

class ModelBuilder;

// Shared geometric context: length unit scale and memoized placements.
class GeomContext {
public:
    explicit GeomContext(const step::StepFile& file) : file_(file) {
        unit_scale_ = find_unit_scale();
    }

    double unit_scale() const { return unit_scale_; }

    const Transform* placement(std::int64_t id) {
        auto it = cache_.find(id);
        if (it != cache_.end()) return it->second ? &*it->second : nullptr;
        auto& slot = cache_[id];
        slot = compute_placement(id, 0);
        return slot ? &*slot : nullptr;
    }

    // 3D axis placement (IfcAxis2Placement3D), identity on missing pieces
    std::optional<Transform> axis_placement3d(std::int64_t id, int depth) {
        const step::Entity* e = file_.find(id);
        if (!e) return std::nullopt;
        if (e->type_name == "IFCAXIS2PLACEMENT3D") {
            Transform tr;
            if (auto loc = ref_arg(*e, 0)) {
                if (auto p = cartesian_point(*loc)) tr.t = *p;
            }
            Point3 z{0, 0, 1}, x{1, 0, 0};
            if (auto az = ref_arg(*e, 1)) {
                if (auto d = direction(*az)) z = normalize(*d);
            }
            if (auto ax = ref_arg(*e, 2)) {
                if (auto d = direction(*ax)) x = *d;
            }
            // Gram-Schmidt: project the nominal X off Z
            const double k = dot(x, z);
            x = normalize({x.x - k * z.x, x.y - k * z.y, x.z - k * z.z});
            if (dot(x, x) < 0.5) x = std::fabs(z.z) < 0.9 ? normalize(cross({0, 0, 1}, z)) : Point3{1, 0, 0};
            const Point3 y = cross(z, x);
            tr.r = {{{x.x, y.x, z.x}, {x.y, y.y, z.y}, {x.z, y.z, z.z}}};
            return tr;
        }
        if (e->type_name == "IFCAXIS2PLACEMENT2D") {
            Transform tr;
            if (auto loc = ref_arg(*e, 0)) {
                if (auto p = cartesian_point(*loc)) tr.t = *p;
            }
            Point3 x{1, 0, 0};
            if (auto ax = ref_arg(*e, 1)) {
                if (auto d = direction(*ax)) x = normalize(*d);
            }
            const Point3 y{-x.y, x.x, 0};
            tr.r = {{{x.x, y.x, 0}, {x.y, y.y, 0}, {0, 0, 1}}};
            return tr;
        }
        (void)depth;
        return std::nullopt;
    }

    std::optional<Point3> cartesian_point(std::int64_t id) const {
        const step::Entity* e = file_.find(id);
        if (!e || e->type_name != "IFCCARTESIANPOINT") return std::nullopt;
        const auto* coords = arg_at(*e, 0);
        if (!coords || !coords->is_list()) return std::nullopt;
        const auto& list = coords->as_list();
        Point3 p;
        if (list.size() >= 1 && (list[0].is_real() || list[0].is_int())) p.x = list[0].as_real() * unit_scale_;
        if (list.size() >= 2 && (list[1].is_real() || list[1].is_int())) p.y = list[1].as_real() * unit_scale_;
        if (list.size() >= 3 && (list[2].is_real() || list[2].is_int())) p.z = list[2].as_real() * unit_scale_;
        return p;
    }

    std::optional<Point3> direction(std::int64_t id) const {
        const step::Entity* e = file_.find(id);
        if (!e || e->type_name != "IFCDIRECTION") return std::nullopt;
        const auto* coords = arg_at(*e, 0);
        if (!coords || !coords->is_list()) return std::nullopt;
        const auto& list = coords->as_list();
        Point3 p{0, 0, 0};
        if (list.size() >= 1 && (list[0].is_real() || list[0].is_int())) p.x = list[0].as_real();
        if (list.size() >= 2 && (list[1].is_real() || list[1].is_int())) p.y = list[1].as_real();
        if (list.size() >= 3 && (list[2].is_real() || list[2].is_int())) p.z = list[2].as_real();
        return p;
    }

    const step::StepFile& file() const { return file_; }

private:
    double find_unit_scale() const {
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCUNITASSIGNMENT") continue;
            const auto* units = arg_at(e, 0);
            if (!units || !units->is_list()) continue;
            for (const auto& u : units->as_list()) {
                if (!u.is_ref()) continue;
                if (auto s = length_unit_scale(u.ref_id(), 0)) return *s;
            }
        }
        return 1.0;  // meters by default
    }

    std::optional<double> length_unit_scale(std::int64_t id, int depth) const {
        if (depth > 8) return std::nullopt;
        const step::Entity* e = file_.find(id);
        if (!e) return std::nullopt;
        if (e->type_name == "IFCSIUNIT") {
            if (enum_arg(*e, 1) != std::optional<std::string>("LENGTHUNIT")) return std::nullopt;
            double scale = 1.0;
            if (auto prefix = enum_arg(*e, 2)) {
                if (*prefix == "MILLI") scale = 1e-3;
                else if (*prefix == "CENTI") scale = 1e-2;
                else if (*prefix == "DECI") scale = 1e-1;
                else if (*prefix == "KILO") scale = 1e3;
            }
            return scale;
        }
        if (e->type_name == "IFCCONVERSIONBASEDUNIT") {
            if (enum_arg(*e, 1) != std::optional<std::string>("LENGTHUNIT")) return std::nullopt;
            auto measure = ref_arg(*e, 3);
            if (!measure) return std::nullopt;
            const step::Entity* m = file_.find(*measure);
            if (!m || m->type_name != "IFCMEASUREWITHUNIT") return std::nullopt;
            const auto* val = arg_at(*m, 0);
            double factor = 1.0;
            if (val) {
                if (val->is_typed() && !val->as_typed().inner.empty() &&
                    (val->as_typed().inner.front().is_real() || val->as_typed().inner.front().is_int()))
                    factor = val->as_typed().inner.front().as_real();
                else if (val->is_real() || val->is_int())
                    factor = val->as_real();
            }
            double base = 1.0;
            if (auto unit_ref = ref_arg(*m, 1)) {
                if (auto b = length_unit_scale(*unit_ref, depth + 1)) base = *b;
            }
            return factor * base;
        }
        return std::nullopt;
    }

    std::optional<Transform> compute_placement(std::int64_t id, int depth) {
        if (depth > 64) return std::nullopt;  // placement cycles
        const step::Entity* e = file_.find(id);
        if (!e) return std::nullopt;
        if (e->type_name != "IFCLOCALPLACEMENT") return axis_placement3d(id, depth);
        Transform local;
        if (auto rel = ref_arg(*e, 1)) {
            if (auto tr = axis_placement3d(*rel, depth)) local = *tr;
        }
        if (auto parent = ref_arg(*e, 0)) {
            if (auto pt = compute_placement(*parent, depth + 1)) return pt->compose(local);
            return std::nullopt;  // dangling parent placement
        }
        return local;
    }

    const step::StepFile& file_;
    double unit_scale_ = 1.0;
    std::map<std::int64_t, std::optional<Transform>> cache_;
};

inline Polygon profile_polygon(GeomContext& ctx, std::int64_t profile_id) {
    const step::Entity* prof = ctx.file().find(profile_id);
    if (!prof) throw UnsupportedRepresentation("profile reference is dangling");
    Polygon poly;
    if (prof->type_name == "IFCARBITRARYCLOSEDPROFILEDEF") {
        auto curve_ref = ref_arg(*prof, 2);
        if (!curve_ref) throw UnsupportedRepresentation("profile has no outer curve");
        const step::Entity* curve = ctx.file().find(*curve_ref);
        if (!curve || curve->type_name != "IFCPOLYLINE")
            throw UnsupportedRepresentation("outer curve is not a polyline");
        const auto* pts = arg_at(*curve, 0);
        if (!pts || !pts->is_list()) throw UnsupportedRepresentation("polyline has no points");
        for (const auto& pv : pts->as_list()) {
            if (!pv.is_ref()) continue;
            if (auto p = ctx.cartesian_point(pv.ref_id())) poly.push_back({p->x, p->y});
        }
    } else if (prof->type_name == "IFCRECTANGLEPROFILEDEF") {
        auto xdim = real_arg(*prof, 3);
        auto ydim = real_arg(*prof, 4);
        if (!xdim || !ydim) throw UnsupportedRepresentation("rectangle profile missing dimensions");
        const double hx = *xdim * ctx.unit_scale() / 2.0;
        const double hy = *ydim * ctx.unit_scale() / 2.0;
        Transform pos;
        if (auto pos_ref = ref_arg(*prof, 2)) {
            if (auto tr = ctx.axis_placement3d(*pos_ref, 0)) pos = *tr;
        }
        for (auto [cx, cy] : {std::pair{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}) {
            const Point3 p = pos.apply({cx, cy, 0});
            poly.push_back({p.x, p.y});
        }
    } else {
        throw UnsupportedRepresentation("unsupported profile type " + prof->type_name);
    }
    return poly;
}

inline bool segments_intersect(const Vertex2& a, const Vertex2& b, const Vertex2& c,
                               const Vertex2& d) {
    auto orient = [](const Vertex2& p, const Vertex2& q, const Vertex2& r) {
        const double v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        if (v > 1e-12) return 1;
        if (v < -1e-12) return -1;
        return 0;
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4;
}

inline bool is_self_intersecting(const Polygon& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (share a vertex)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return true;
        }
    }
    return false;
}

inline Polygon normalize_polygon(Polygon poly) {
    // drop the closing duplicate and consecutive duplicates
    auto same = [](const Vertex2& a, const Vertex2& b) {
        return std::fabs(a[0] - b[0]) < 1e-9 && std::fabs(a[1] - b[1]) < 1e-9;
    };
    if (poly.size() >= 2 && same(poly.front(), poly.back())) poly.pop_back();
    Polygon out;
    for (const auto& p : poly) {
        if (out.empty() || !same(out.back(), p)) out.push_back(p);
    }
    if (out.size() < 3) throw UnsupportedRepresentation("footprint has fewer than 3 vertices");
    const double area = signed_area(out);
    if (std::fabs(area) < 1e-9) throw UnsupportedRepresentation("footprint area is zero");
    if (area < 0) std::reverse(out.begin(), out.end());  // normalize to CCW
    if (is_self_intersecting(out)) throw UnsupportedRepresentation("footprint self-intersects");
    return out;
}

}  // namespace detail

// Extracts the 2D footprint of an IfcSpace in building-local meters (CCW).
// Throws UnsupportedRepresentation when no usable boundary exists.
inline Polygon footprint_of(const step::Entity& space, const step::StepFile& file,
                            detail::GeomContext* shared_ctx = nullptr,
                            std::optional<double>* height_out = nullptr) {
    detail::GeomContext own_ctx{shared_ctx ? shared_ctx->file() : file};
    detail::GeomContext& ctx = shared_ctx ? *shared_ctx : own_ctx;

    detail::Transform world;  // space placement
    if (auto pl = detail::ref_arg(space, 5)) {
        if (const auto* tr = ctx.placement(*pl)) world = *tr;
    }

    auto rep_ref = detail::ref_arg(space, 6);
    if (!rep_ref) throw UnsupportedRepresentation("space has no shape representation");
    const step::Entity* shape = file.find(*rep_ref);
    if (!shape || shape->type_name != "IFCPRODUCTDEFINITIONSHAPE")
        throw UnsupportedRepresentation("space representation is not a product shape");
    const auto* reps = detail::arg_at(*shape, 2);
    if (!reps || !reps->is_list()) throw UnsupportedRepresentation("product shape lists no representations");

    std::string why = "no swept-solid or polyline footprint found";
    for (const auto& rv : reps->as_list()) {
        if (!rv.is_ref()) continue;
        const step::Entity* rep = file.find(rv.ref_id());
        if (!rep || rep->type_name != "IFCSHAPEREPRESENTATION") continue;
        const auto* items = detail::arg_at(*rep, 3);
        if (!items || !items->is_list()) continue;
        for (const auto& iv : items->as_list()) {
            if (!iv.is_ref()) continue;
            const step::Entity* item = file.find(iv.ref_id());
            if (!item) continue;
            try {
                if (item->type_name == "IFCEXTRUDEDAREASOLID") {
                    auto profile_ref = detail::ref_arg(*item, 0);
                    if (!profile_ref) throw UnsupportedRepresentation("extrusion has no profile");
                    Polygon poly = detail::profile_polygon(ctx, *profile_ref);
                    detail::Transform solid_pos;
                    if (auto pos_ref = detail::ref_arg(*item, 1)) {
                        if (auto tr = ctx.axis_placement3d(*pos_ref, 0)) solid_pos = *tr;
                    }
                    Polygon out;
                    for (const auto& v : poly) {
                        const Point3 p = world.apply(solid_pos.apply({v[0], v[1], 0}));
                        out.push_back({p.x, p.y});
                    }
                    if (height_out) {
                        if (auto depth = detail::real_arg(*item, 3))
                            *height_out = *depth * ctx.unit_scale();
                    }
                    return detail::normalize_polygon(std::move(out));
                }
                if (item->type_name == "IFCPOLYLINE") {
                    const auto* pts = detail::arg_at(*item, 0);
                    if (!pts || !pts->is_list()) throw UnsupportedRepresentation("polyline has no points");
                    Polygon out;
                    for (const auto& pv : pts->as_list()) {
                        if (!pv.is_ref()) continue;
                        if (auto p = ctx.cartesian_point(pv.ref_id())) {
                            const Point3 w = world.apply(*p);
                            out.push_back({w.x, w.y});
                        }
                    }
                    return detail::normalize_polygon(std::move(out));
                }
            } catch (const UnsupportedRepresentation& e) {
                why = e.what();  // try the next representation item
            }
        }
    }
    throw UnsupportedRepresentation(why);
}

namespace detail {

class ModelBuilder {
public:
    ModelBuilder(const step::StepFile& file) : file_(file), ctx_(file) {}

    ExtractResult build() {
        collect_building();
        collect_levels();
        collect_rooms();
        collect_zones();
        collect_equipment_and_ducts();
        collect_ports();
        collect_psets();
        check_identifier_uniqueness();
        return {std::move(model_), std::move(diags_)};
    }

private:
    // registers a source id; false (w/ diagnostic) on empty or duplicate
    bool claim_source_id(const std::string& src, const std::string& what) {
        if (src.empty()) {
            add_diag(diags_, "empty-source-id", Severity::Warning, "",
                     what + " has an empty GlobalId; element skipped");
            return false;
        }
        if (!seen_ids_.insert(src).second) {
            add_diag(diags_, "duplicate-source-id", Severity::Warning, src,
                     what + " repeats GlobalId '" + src + "'; element skipped");
            return false;
        }
        return true;
    }

    void collect_building() {
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCBUILDING") continue;
            auto src = string_arg(e, 0).value_or("");
            if (!claim_source_id(src, "IfcBuilding")) continue;
            model_.building_source_id = src;
            model_.building_name = string_arg(e, 2).value_or("Building");
            if (model_.building_name.empty()) model_.building_name = "Building";
            return;  // single building per run; extras ignored below
        }
        throw MissingBuilding();
    }

    void collect_levels() {
        bool extra_building_noted = false;
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name == "IFCBUILDING" && string_arg(e, 0).value_or("") != model_.building_source_id) {
                if (!extra_building_noted) {
                    add_diag(diags_, "extra-building", Severity::Warning,
                             string_arg(e, 0).value_or(""),
                             "multiple IfcBuilding entities; only the first is converted");
                    extra_building_noted = true;
                }
                continue;
            }
            if (e.type_name != "IFCBUILDINGSTOREY") continue;
            auto src = string_arg(e, 0).value_or("");
            if (!claim_source_id(src, "IfcBuildingStorey")) continue;
            Level lvl;
            lvl.source_id = src;
            lvl.name = string_arg(e, 2).value_or("Level");
            if (auto elev = real_arg(e, 9)) {
                lvl.elevation = *elev * ctx_.unit_scale();
            } else if (auto pl = ref_arg(e, 5)) {
                if (const auto* tr = ctx_.placement(*pl)) lvl.elevation = tr->t.z;
            }
            model_.levels.push_back(std::move(lvl));
            storey_ids_.insert(id);
        }
        std::stable_sort(model_.levels.begin(), model_.levels.end(),
                         [](const Level& a, const Level& b) { return a.elevation < b.elevation; });
        for (std::size_t i = 1; i < model_.levels.size(); ++i) {
            if (!(model_.levels[i - 1].elevation < model_.levels[i].elevation))
                add_diag(diags_, "duplicate-elevation", Severity::Warning,
                         model_.levels[i].source_id,
                         "storeys '" + model_.levels[i - 1].name + "' and '" + model_.levels[i].name +
                             "' share elevation; containment by height is ambiguous");
        }
    }

    void collect_rooms() {
        // space instance id -> (storey instance id, relation instance id)
        std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> containment;
        for (const auto& [rel_id, e] : file_.entities) {
            if (e.type_name == "IFCRELAGGREGATES") {
                auto parent = ref_arg(e, 4);
                const auto* children = arg_at(e, 5);
                if (!parent || !storey_ids_.count(*parent) || !children || !children->is_list()) continue;
                for (const auto& c : children->as_list()) {
                    if (!c.is_ref()) continue;
                    note_containment(containment, c.ref_id(), *parent, rel_id);
                }
            } else if (e.type_name == "IFCRELCONTAINEDINSPATIALSTRUCTURE") {
                auto parent = ref_arg(e, 5);
                const auto* children = arg_at(e, 4);
                if (!parent || !storey_ids_.count(*parent) || !children || !children->is_list()) continue;
                for (const auto& c : children->as_list()) {
                    if (!c.is_ref()) continue;
                    note_containment(containment, c.ref_id(), *parent, rel_id);
                }
            }
        }

        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCSPACE") continue;
            auto src = string_arg(e, 0).value_or("");
            if (!claim_source_id(src, "IfcSpace")) continue;
            auto it = containment.find(id);
            if (it == containment.end()) {
                add_diag(diags_, "orphan-room", Severity::Warning, src,
                         "space '" + string_arg(e, 2).value_or(src) + "' is not contained in any storey");
                continue;
            }
            Room room;
            room.source_id = src;
            room.name = string_arg(e, 2).value_or("");
            if (room.name.empty()) room.name = string_arg(e, 7).value_or(src);
            const step::Entity* storey = file_.find(it->second.first);
            room.level_ref = storey ? string_arg(*storey, 0).value_or("") : "";
            try {
                std::optional<double> height;
                room.footprint = footprint_of(e, file_, &ctx_, &height);
                room.height = height;
            } catch (const UnsupportedRepresentation& ex) {
                add_diag(diags_, "no-footprint", Severity::Notice, src,
                         "room '" + room.name + "' has no usable footprint: " + ex.what());
            }
            space_ids_[id] = src;
            model_.rooms.push_back(std::move(room));
        }
    }

    void note_containment(std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>>& m,
                          std::int64_t space, std::int64_t storey, std::int64_t rel) {
        const step::Entity* ent = file_.find(space);
        if (!ent || ent->type_name != "IFCSPACE") return;
        auto [it, inserted] = m.emplace(space, std::pair{storey, rel});
        if (!inserted && it->second.first != storey) {
            // keep the relation with the smallest instance id
            add_diag(diags_, "ambiguous-containment", Severity::Warning,
                     string_arg(*ent, 0).value_or(""),
                     "space is claimed by multiple storeys; assigned by first relation in instance-id order");
            if (rel < it->second.second) it->second = {storey, rel};
        }
    }

    void collect_zones() {
        std::map<std::int64_t, std::vector<std::string>> members;  // zone instance -> room src ids
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCRELASSIGNSTOGROUP") continue;
            auto group = ref_arg(e, 6);
            const auto* objs = arg_at(e, 4);
            if (!group || !objs || !objs->is_list()) continue;
            for (const auto& o : objs->as_list()) {
                if (!o.is_ref()) continue;
                auto it = space_ids_.find(o.ref_id());
                if (it != space_ids_.end()) members[*group].push_back(it->second);
            }
        }
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCZONE" && e.type_name != "IFCSPATIALZONE") continue;
            auto src = string_arg(e, 0).value_or("");
            if (!claim_source_id(src, e.type_name)) continue;
            HvacZone zone;
            zone.source_id = src;
            zone.name = string_arg(e, 2).value_or(src);
            auto it = members.find(id);
            if (it != members.end()) {
                std::set<std::string> seen;
                for (const auto& r : it->second)
                    if (seen.insert(r).second) zone.room_refs.push_back(r);
            }
            if (zone.room_refs.empty()) {
                add_diag(diags_, "empty-zone", Severity::Warning, src,
                         "zone '" + zone.name + "' groups no rooms; zone skipped");
                seen_ids_.erase(src);
                continue;
            }
            model_.zones.push_back(std::move(zone));
        }
    }

    static bool thermostat_tagged(const step::Entity& e) {
        for (std::size_t i : {std::size_t{8}, std::size_t{4}}) {  // PredefinedType, ObjectType
            if (auto tok = enum_arg(e, i); tok && *tok == "THERMOSTAT") return true;
        }
        for (std::size_t i : {std::size_t{4}, std::size_t{2}, std::size_t{7}}) {
            if (auto s = string_arg(e, i); s && contains_ci(*s, "THERMOSTAT")) return true;
        }
        return false;
    }

    void collect_equipment_and_ducts() {
        for (const auto& [id, e] : file_.entities) {
            std::optional<EquipmentKind> kind;
            if (e.type_name == "IFCAIRTERMINALBOX") kind = EquipmentKind::Vav;
            else if (e.type_name == "IFCUNITARYEQUIPMENT") kind = EquipmentKind::Fcu;
            else if (e.type_name == "IFCAIRTERMINAL") kind = EquipmentKind::AirTerminal;
            else if ((e.type_name == "IFCCONTROLLER" || e.type_name == "IFCSENSOR") && thermostat_tagged(e))
                kind = EquipmentKind::Thermostat;

            if (kind) {
                auto src = string_arg(e, 0).value_or("");
                if (!claim_source_id(src, e.type_name)) continue;
                Equipment eq;
                eq.source_id = src;
                eq.name = string_arg(e, 2).value_or(src);
                eq.kind = *kind;
                if (auto pl = ref_arg(e, 5)) {
                    if (const auto* tr = ctx_.placement(*pl))
                        eq.placement_point = tr->apply({0, 0, 0});
                }
                if (!eq.placement_point)
                    add_diag(diags_, "no-placement", Severity::Notice, src,
                             std::string(to_string(*kind)) + " '" + eq.name +
                                 "' has no resolvable placement; it cannot be located spatially");
                element_ids_[id] = src;
                model_.equipment.push_back(std::move(eq));
                continue;
            }
            if (e.type_name == "IFCDUCTSEGMENT" || e.type_name == "IFCDUCTFITTING") {
                auto src = string_arg(e, 0).value_or("");
                if (!claim_source_id(src, e.type_name)) continue;
                Duct duct;
                duct.source_id = src;
                duct.name = string_arg(e, 2).value_or(src);
                element_ids_[id] = src;
                model_.ducts.push_back(std::move(duct));
            }
        }
    }

    void collect_ports() {
        std::map<std::int64_t, std::string> port_src;  // instance id -> source id
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCDISTRIBUTIONPORT") continue;
            auto src = string_arg(e, 0).value_or("");
            if (!claim_source_id(src, "IfcDistributionPort")) continue;
            Port port;
            port.source_id = src;
            if (auto pl = ref_arg(e, 4)) {
                if (const auto* tr = ctx_.placement(*pl)) port.position = tr->apply({0, 0, 0});
            }
            if (auto flow = enum_arg(e, 6)) {
                if (*flow == "SOURCE") port.flow_direction = FlowDirection::Source;
                else if (*flow == "SINK") port.flow_direction = FlowDirection::Sink;
                else if (*flow == "SOURCEANDSINK") port.flow_direction = FlowDirection::Bidirectional;
            }
            port_src[id] = src;
            model_.ports.push_back(std::move(port));
        }

        auto attach = [&](std::int64_t port_id, std::int64_t element_id) {
            auto ps = port_src.find(port_id);
            auto es = element_ids_.find(element_id);
            if (ps == port_src.end() || es == element_ids_.end()) return;
            for (auto& p : model_.ports) {
                if (p.source_id != ps->second) continue;
                if (!p.owner_ref.empty() && p.owner_ref != es->second) {
                    add_diag(diags_, "port-reattached", Severity::Warning, p.source_id,
                             "port is attached to multiple elements; keeping the first");
                    return;
                }
                p.owner_ref = es->second;
            }
            for (auto& eq : model_.equipment)
                if (eq.source_id == es->second) {
                    if (std::find(eq.port_refs.begin(), eq.port_refs.end(), ps->second) ==
                        eq.port_refs.end())
                        eq.port_refs.push_back(ps->second);
                }
            for (auto& d : model_.ducts)
                if (d.source_id == es->second) {
                    if (std::find(d.port_refs.begin(), d.port_refs.end(), ps->second) == d.port_refs.end())
                        d.port_refs.push_back(ps->second);
                }
        };

        for (const auto& [id, e] : file_.entities) {
            if (e.type_name == "IFCRELCONNECTSPORTTOELEMENT") {
                auto port = ref_arg(e, 4);
                auto element = ref_arg(e, 5);
                if (port && element) attach(*port, *element);
            } else if (e.type_name == "IFCRELNESTS") {
                auto element = ref_arg(e, 4);
                const auto* ports = arg_at(e, 5);
                if (!element || !ports || !ports->is_list()) continue;
                for (const auto& p : ports->as_list())
                    if (p.is_ref()) attach(p.ref_id(), *element);
            }
        }

        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCRELCONNECTSPORTS") continue;
            auto a = ref_arg(e, 4);
            auto b = ref_arg(e, 5);
            if (!a || !b) continue;
            auto sa = port_src.find(*a);
            auto sb = port_src.find(*b);
            if (sa == port_src.end() || sb == port_src.end()) continue;
            Port* pa = nullptr;
            Port* pb = nullptr;
            for (auto& p : model_.ports) {
                if (p.source_id == sa->second) pa = &p;
                if (p.source_id == sb->second) pb = &p;
            }
            if (!pa || !pb || pa == pb) continue;
            if ((pa->connected_to && *pa->connected_to != pb->source_id) ||
                (pb->connected_to && *pb->connected_to != pa->source_id)) {
                add_diag(diags_, "port-reconnected", Severity::Warning, pa->source_id,
                         "port participates in multiple connections; keeping the first");
                continue;
            }
            pa->connected_to = pb->source_id;
            pb->connected_to = pa->source_id;
        }

        for (const auto& p : model_.ports) {
            if (p.owner_ref.empty())
                add_diag(diags_, "orphan-port", Severity::Notice, p.source_id,
                         "distribution port is not attached to any element");
        }
    }

    void collect_psets() {
        for (const auto& [id, e] : file_.entities) {
            if (e.type_name != "IFCRELDEFINESBYPROPERTIES") continue;
            auto def_ref = ref_arg(e, 5);
            const auto* objs = arg_at(e, 4);
            if (!def_ref || !objs || !objs->is_list()) continue;
            const step::Entity* pset_ent = file_.find(*def_ref);
            if (!pset_ent || pset_ent->type_name != "IFCPROPERTYSET") continue;

            Pset pset;
            pset.name = string_arg(*pset_ent, 2).value_or("");
            const auto* props = arg_at(*pset_ent, 4);
            if (props && props->is_list()) {
                for (const auto& pv : props->as_list()) {
                    if (!pv.is_ref()) continue;
                    const step::Entity* prop = file_.find(pv.ref_id());
                    if (!prop || prop->type_name != "IFCPROPERTYSINGLEVALUE") continue;
                    auto key = string_arg(*prop, 0).value_or("");
                    if (key.empty()) continue;
                    std::string value;
                    if (const auto* nominal = arg_at(*prop, 2)) value = value_to_plain_string(*nominal);
                    pset.entries.emplace_back(key, value);
                }
            }

            for (const auto& o : objs->as_list()) {
                if (!o.is_ref()) continue;
                auto it = element_ids_.find(o.ref_id());
                std::string target;
                if (it != element_ids_.end()) target = it->second;
                else if (auto sp = space_ids_.find(o.ref_id()); sp != space_ids_.end()) target = sp->second;
                if (target.empty()) continue;
                model_.psets[target].push_back(pset);
                if (pset.name == "BIM2BRICK") apply_bms_params(target, pset);
            }
        }
    }

    void apply_bms_params(const std::string& element_src, const Pset& pset) {
        Equipment* eq = nullptr;
        for (auto& e : model_.equipment)
            if (e.source_id == element_src) eq = &e;
        if (!eq) return;  // BIM2BRICK psets are only meaningful on equipment
        for (const auto& [key, value] : pset.entries) {
            if (value.empty()) continue;
            if (key == "Identifier") eq->bms.identifier = value;
            else if (key == "HostingRoom") eq->bms.hosting_room = value;
            else if (key == "TimeSeriesId") eq->bms.timeseries_id = value;
            else if (key == "MasterPanel") eq->bms.master_panel = value;
            else if (key == "ControlsIdentifier") eq->bms.controls_identifier = value;
            else if (key == "Points") parse_points(*eq, value);
        }
    }

    void parse_points(Equipment& eq, const std::string& value) {
        std::size_t start = 0;
        while (start <= value.size()) {
            std::size_t end = value.find(';', start);
            std::string item = value.substr(start, end == std::string::npos ? std::string::npos : end - start);
            start = end == std::string::npos ? value.size() + 1 : end + 1;
            // trim
            while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.erase(item.begin());
            while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.pop_back();
            if (item.empty()) continue;
            std::string kind = item, tsid;
            if (auto colon = item.find(':'); colon != std::string::npos) {
                kind = item.substr(0, colon);
                tsid = item.substr(colon + 1);
            }
            if (auto pk = parse_point_kind(kind)) {
                eq.bms.points.push_back({*pk, tsid});
            } else {
                add_diag(diags_, "unknown-point-kind", Severity::Warning, eq.source_id,
                         "unknown point kind '" + kind + "' in BIM2BRICK Points");
            }
        }
    }

    void check_identifier_uniqueness() {
        std::set<std::string> seen;
        for (auto& eq : model_.equipment) {
            if (!eq.bms.identifier) continue;
            if (!seen.insert(*eq.bms.identifier).second) {
                add_diag(diags_, "duplicate-bms-identifier", Severity::Warning, eq.source_id,
                         "BMS identifier '" + *eq.bms.identifier + "' is not unique; dropped on this element");
                eq.bms.identifier.reset();
            }
        }
    }

    const step::StepFile& file_;
    GeomContext ctx_;
    BuildingModel model_;
    Diagnostics diags_;
    std::set<std::string> seen_ids_;
    std::set<std::int64_t> storey_ids_;
    std::map<std::int64_t, std::string> space_ids_;    // instance id -> source id
    std::map<std::int64_t, std::string> element_ids_;  // equipment/duct instance -> source id
};

}  // namespace detail

// Builds the typed building model. Throws MissingBuilding when the file has
// no IfcBuilding; all other findings are returned as diagnostics.
inline ExtractResult extract_model(const step::StepFile& file) {
    return detail::ModelBuilder(file).build();
}

}  // namespace bim2brick::ifc

#endif
