#ifndef BIM2BRICK_GEO_TRANSFORM_HPP
#define BIM2BRICK_GEO_TRANSFORM_HPP

// WGS84 <-> UTM conversion and the calibrated site transform that maps UTM
// coordinates into the building-local frame.
//
// The projection is the Krueger series in the third flattening n, kept to
// n^6 (forward and inverse), which is accurate to well under a millimeter
// anywhere inside a UTM zone.

#include <bim2brick/diagnostics.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bim2brick::geo {

class OutOfRange : public Error {
public:
    using Error::Error;
};

class ZoneMismatch : public Error {
public:
    using Error::Error;
};

struct GeoSample {
    double latitude = 0;   // degrees, -80..84
    double longitude = 0;  // degrees, -180..180
    double altitude = 0;   // meters

    bool operator==(const GeoSample&) const = default;
};

struct UtmCoord {
    double easting = 0;   // meters
    double northing = 0;  // meters
    int zone_number = 0;  // 1..60
    char zone_letter = 0; // MGRS band C..X (>= 'N' means northern hemisphere)

    bool operator==(const UtmCoord&) const = default;
};

struct LocalPoint {
    double x = 0;
    double y = 0;
    double z = 0;

    bool operator==(const LocalPoint&) const = default;
};

// Calibrated mapping from UTM to the building frame:
//   p = scale * R(rotation_deg) * (utm - origin),  z = scale * (alt - origin alt)
struct SiteTransform {
    UtmCoord origin;
    double origin_altitude = 0;
    double rotation_deg = 0;  // CCW positive, normalized to [0, 360)
    double scale = 1.0;       // > 0
};

namespace detail {

inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kInvFlattening = 298.257223563;
inline constexpr double kScale0 = 0.9996;
inline constexpr double kFalseEasting = 500000.0;
inline constexpr double kFalseNorthingSouth = 10000000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kF = 1.0 / kInvFlattening;
inline constexpr double kE2 = kF * (2.0 - kF);
inline constexpr double kN = kF / (2.0 - kF);  // third flattening

struct Series {
    double rect_radius;           // rectifying radius A
    std::array<double, 6> alpha;  // forward coefficients
    std::array<double, 6> beta;   // inverse coefficients
};

inline const Series& series() {
    static const Series s = [] {
        const double n = kN;
        const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
        Series r;
        r.rect_radius = kSemiMajor / (1 + n) * (1 + n2 / 4 + n4 / 64 + n6 / 256);
        r.alpha = {
            n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
            13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
            61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
            49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
            34729 * n5 / 80640 - 3418889 * n6 / 1995840,
            212378941 * n6 / 319334400,
        };
        r.beta = {
            n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
            n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
            17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
            4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
            4583 * n5 / 161280 - 108847 * n6 / 3991680,
            20648693 * n6 / 638668800,
        };
        return r;
    }();
    return s;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline double central_meridian_deg(int zone) { return zone * 6.0 - 183.0; }

// tan of the conformal latitude for geodetic tan(phi)
inline double conformal_tau(double tau) {
    const double e = std::sqrt(kE2);
    const double sigma = std::sinh(e * std::atanh(e * tau / std::sqrt(1 + tau * tau)));
    return tau * std::sqrt(1 + sigma * sigma) - sigma * std::sqrt(1 + tau * tau);
}

// inverts conformal_tau by Newton iteration on the geodetic latitude
inline double geodetic_from_conformal(double tau_prime) {
    const double chi = std::atan(tau_prime);
    double phi = chi;
    for (int i = 0; i < 10; ++i) {
        const double s = std::sin(phi);
        const double tau = std::tan(phi);
        const double f = std::atan(conformal_tau(tau)) - chi;
        const double dchi_dphi =
            (1 - kE2) / (1 - kE2 * s * s) * std::cos(chi + f) / std::cos(phi);
        const double step = f / dchi_dphi;
        phi -= step;
        if (std::fabs(step) < 1e-15) break;
    }
    return phi;
}

}  // namespace detail

inline char band_letter(double lat_deg) {
    static const char* bands = "CDEFGHJKLMNPQRSTUVWX";
    int idx = static_cast<int>(std::floor((lat_deg + 80.0) / 8.0));
    if (idx > 19) idx = 19;  // X band is widened to 84
    if (idx < 0) idx = 0;
    return bands[idx];
}

inline int zone_for_longitude(double lon_deg) {
    int zone = static_cast<int>(std::floor((lon_deg + 180.0) / 6.0)) + 1;
    if (zone < 1) zone = 1;
    if (zone > 60) zone = ((zone - 1) % 60) + 1;  // lon = 180 wraps into zone 1
    return zone;
}

inline UtmCoord wgs84_to_utm(const GeoSample& s) {
    if (!std::isfinite(s.latitude) || !std::isfinite(s.longitude) || !std::isfinite(s.altitude))
        throw OutOfRange("non-finite coordinate");
    if (s.latitude < -80.0 || s.latitude > 84.0)
        throw OutOfRange("latitude " + std::to_string(s.latitude) + " outside UTM band coverage");
    if (s.longitude < -180.0 || s.longitude > 180.0)
        throw OutOfRange("longitude " + std::to_string(s.longitude) + " out of range");

    const int zone = zone_for_longitude(s.longitude);
    const double lam = detail::deg2rad(s.longitude - detail::central_meridian_deg(zone));
    const double phi = detail::deg2rad(s.latitude);

    const double tau_p = detail::conformal_tau(std::tan(phi));
    const double xi_p = std::atan2(tau_p, std::cos(lam));
    const double eta_p = std::asinh(std::sin(lam) / std::hypot(tau_p, std::cos(lam)));

    const auto& ser = detail::series();
    double xi = xi_p, eta = eta_p;
    for (int j = 0; j < 6; ++j) {
        const double a = 2.0 * (j + 1);
        xi += ser.alpha[j] * std::sin(a * xi_p) * std::cosh(a * eta_p);
        eta += ser.alpha[j] * std::cos(a * xi_p) * std::sinh(a * eta_p);
    }

    UtmCoord out;
    out.zone_number = zone;
    out.zone_letter = band_letter(s.latitude);
    out.easting = detail::kFalseEasting + detail::kScale0 * ser.rect_radius * eta;
    out.northing = detail::kScale0 * ser.rect_radius * xi;
    if (s.latitude < 0) out.northing += detail::kFalseNorthingSouth;
    return out;
}

inline GeoSample utm_to_wgs84(const UtmCoord& u, double altitude = 0.0) {
    if (u.zone_number < 1 || u.zone_number > 60)
        throw OutOfRange("UTM zone " + std::to_string(u.zone_number) + " out of range");
    if (u.easting <= 100000.0 || u.easting >= 900000.0)
        throw OutOfRange("easting " + std::to_string(u.easting) + " out of range");
    if (u.northing < 0.0 || u.northing > 10000000.0)
        throw OutOfRange("northing " + std::to_string(u.northing) + " out of range");
    const char letter = static_cast<char>(std::toupper(u.zone_letter));
    if (std::string("CDEFGHJKLMNPQRSTUVWX").find(letter) == std::string::npos)
        throw OutOfRange(std::string("invalid band letter '") + u.zone_letter + "'");

    const bool southern = letter < 'N';
    const auto& ser = detail::series();
    const double xi0 =
        (u.northing - (southern ? detail::kFalseNorthingSouth : 0.0)) /
        (detail::kScale0 * ser.rect_radius);
    const double eta0 = (u.easting - detail::kFalseEasting) / (detail::kScale0 * ser.rect_radius);

    double xi = xi0, eta = eta0;
    for (int j = 0; j < 6; ++j) {
        const double a = 2.0 * (j + 1);
        xi -= ser.beta[j] * std::sin(a * xi0) * std::cosh(a * eta0);
        eta -= ser.beta[j] * std::cos(a * xi0) * std::sinh(a * eta0);
    }

    const double tau_p = std::sin(xi) / std::hypot(std::sinh(eta), std::cos(xi));
    const double lam = std::atan2(std::sinh(eta), std::cos(xi));
    const double phi = detail::geodetic_from_conformal(tau_p);

    GeoSample out;
    out.latitude = detail::rad2deg(phi);
    out.longitude = detail::central_meridian_deg(u.zone_number) + detail::rad2deg(lam);
    out.altitude = altitude;
    return out;
}

inline double normalize_rotation_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0) r += 360.0;
    return r;
}

inline LocalPoint to_local(const GeoSample& s, const SiteTransform& t) {
    const UtmCoord u = wgs84_to_utm(s);
    if (u.zone_number != t.origin.zone_number)
        throw ZoneMismatch("sample in UTM zone " + std::to_string(u.zone_number) +
                           ", site calibrated for zone " + std::to_string(t.origin.zone_number));
    const bool sample_south = u.zone_letter < 'N';
    const bool origin_south = t.origin.zone_letter < 'N';
    if (sample_south != origin_south)
        throw ZoneMismatch("sample and site origin are in different hemispheres");

    const double de = u.easting - t.origin.easting;
    const double dn = u.northing - t.origin.northing;
    const double a = detail::deg2rad(normalize_rotation_deg(t.rotation_deg));
    const double ca = std::cos(a), sa = std::sin(a);
    LocalPoint p;
    p.x = t.scale * (ca * de - sa * dn);
    p.y = t.scale * (sa * de + ca * dn);
    p.z = t.scale * (s.altitude - t.origin_altitude);
    return p;
}

// One surveyed correspondence used for calibration.
struct CalibrationPair {
    GeoSample geo;
    LocalPoint local;
};

struct FitResult {
    SiteTransform transform;
    std::vector<double> residuals_m;  // horizontal residual per pair
    double max_residual_m = 0;
    double rms_residual_m = 0;
};

// Least-squares similarity fit (rotation, translation, scale) from >= 2
// surveyed point pairs. The vertical axis is an affine offset fitted from the
// average altitude difference.
inline FitResult fit_transform(const std::vector<CalibrationPair>& pairs) {
    if (pairs.size() < 2) throw Error("fit_transform requires at least 2 point pairs");

    std::vector<UtmCoord> utm;
    utm.reserve(pairs.size());
    for (const auto& p : pairs) utm.push_back(wgs84_to_utm(p.geo));
    for (std::size_t i = 1; i < utm.size(); ++i) {
        if (utm[i].zone_number != utm[0].zone_number)
            throw ZoneMismatch("calibration pairs span multiple UTM zones");
    }

    const double inv_n = 1.0 / static_cast<double>(pairs.size());
    double ue = 0, un = 0, lx = 0, ly = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ue += utm[i].easting;
        un += utm[i].northing;
        lx += pairs[i].local.x;
        ly += pairs[i].local.y;
    }
    ue *= inv_n;
    un *= inv_n;
    lx *= inv_n;
    ly *= inv_n;

    // Umeyama-style 2-D similarity on centered coordinates
    double sxx = 0, cross_cos = 0, cross_sin = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double de = utm[i].easting - ue;
        const double dn = utm[i].northing - un;
        const double dx = pairs[i].local.x - lx;
        const double dy = pairs[i].local.y - ly;
        sxx += de * de + dn * dn;
        cross_cos += dx * de + dy * dn;
        cross_sin += dy * de - dx * dn;
    }
    if (sxx <= 0) throw Error("fit_transform: calibration points are coincident");
    const double theta = std::atan2(cross_sin, cross_cos);
    const double scale = std::hypot(cross_cos, cross_sin) / sxx;
    if (!(scale > 0)) throw Error("fit_transform: degenerate scale");

    // origin o satisfies centroid(local) = s*R*(centroid(utm) - o)
    const double ca = std::cos(theta), sa = std::sin(theta);
    const double ox = ue - (ca * lx + sa * ly) / scale;
    const double oy = un - (-sa * lx + ca * ly) / scale;

    double alt = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        alt += pairs[i].geo.altitude - pairs[i].local.z / scale;
    alt *= inv_n;

    FitResult result;
    result.transform.origin = utm[0];
    result.transform.origin.easting = ox;
    result.transform.origin.northing = oy;
    result.transform.origin_altitude = alt;
    result.transform.rotation_deg = normalize_rotation_deg(detail::rad2deg(theta));
    result.transform.scale = scale;

    double sum_sq = 0;
    for (const auto& p : pairs) {
        const LocalPoint q = to_local(p.geo, result.transform);
        const double r = std::hypot(q.x - p.local.x, q.y - p.local.y);
        result.residuals_m.push_back(r);
        result.max_residual_m = std::max(result.max_residual_m, r);
        sum_sq += r * r;
    }
    result.rms_residual_m = std::sqrt(sum_sq * inv_n);
    return result;
}

// Builds a SiteTransform from configuration values (lat/lon/alt of the local
// origin plus rotation and scale).
inline SiteTransform make_site_transform(double origin_lat, double origin_lon,
                                         double origin_alt, double rotation_deg,
                                         double scale) {
    if (!(scale > 0)) throw Error("site transform scale must be positive");
    SiteTransform t;
    t.origin = wgs84_to_utm({origin_lat, origin_lon, origin_alt});
    t.origin_altitude = origin_alt;
    t.rotation_deg = normalize_rotation_deg(rotation_deg);
    t.scale = scale;
    return t;
}

}  // namespace bim2brick::geo

#endif
