#include <bim2brick/geo_transform.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace bim2brick;

namespace {

struct GoldenRow {
    double lat, lon, easting, northing;
    int zone;
    char band;
};

std::vector<GoldenRow> load_golden() {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/utm_golden.csv");
    REQUIRE(in.good());
    std::vector<GoldenRow> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        GoldenRow r{};
        char band[8] = {0};
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%d,%1[A-Z],%lf,%lf", &r.lat, &r.lon, &r.zone,
                            band, &r.easting, &r.northing) == 6);
        r.band = band[0];
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("geo: forward projection matches surveyed golden table within 1 cm") {
    const auto rows = load_golden();
    REQUIRE(rows.size() >= 100);
    double worst = 0;
    for (const auto& r : rows) {
        const geo::UtmCoord u = geo::wgs84_to_utm({r.lat, r.lon, 0});
        CAPTURE(r.lat, r.lon);
        CHECK(u.zone_number == r.zone);
        CHECK(u.zone_letter == r.band);
        const double err = std::hypot(u.easting - r.easting, u.northing - r.northing);
        worst = std::max(worst, err);
        CHECK(err <= 0.01);
    }
    INFO("worst horizontal error " << worst << " m");
    CHECK(worst <= 0.01);
}

TEST_CASE("geo: inverse projection round-trips to 1e-9 degrees") {
    const auto rows = load_golden();
    for (const auto& r : rows) {
        const geo::UtmCoord u = geo::wgs84_to_utm({r.lat, r.lon, 0});
        const geo::GeoSample back = geo::utm_to_wgs84(u, 0);
        CAPTURE(r.lat, r.lon);
        CHECK(std::fabs(back.latitude - r.lat) <= 1e-9);
        CHECK(std::fabs(back.longitude - r.lon) <= 1e-9);
    }
}

TEST_CASE("geo: points on a central meridian project to the false easting") {
    // zone 31 central meridian is 3 E
    const geo::UtmCoord u = geo::wgs84_to_utm({0.0, 3.0, 0});
    CHECK(u.zone_number == 31);
    CHECK(std::fabs(u.easting - 500000.0) <= 1e-6);
    CHECK(std::fabs(u.northing) <= 1e-6);

    const geo::UtmCoord v = geo::wgs84_to_utm({45.0, 9.0, 0});  // zone 32 CM
    CHECK(v.zone_number == 32);
    CHECK(std::fabs(v.easting - 500000.0) <= 1e-6);
}

TEST_CASE("geo: southern hemisphere uses the false northing") {
    const geo::UtmCoord sydney = geo::wgs84_to_utm({-33.8688, 151.2093, 0});
    CHECK(sydney.zone_number == 56);
    CHECK(sydney.zone_letter == 'H');
    CHECK(sydney.northing > 6000000.0);  // 10e6 minus ~3.75e6
    const geo::GeoSample back = geo::utm_to_wgs84(sydney);
    CHECK(std::fabs(back.latitude - -33.8688) <= 1e-9);
    CHECK(std::fabs(back.longitude - 151.2093) <= 1e-9);
}

TEST_CASE("geo: out-of-range inputs are rejected") {
    CHECK_THROWS_AS(geo::wgs84_to_utm({85.1, 0, 0}), geo::OutOfRange);
    CHECK_THROWS_AS(geo::wgs84_to_utm({-80.5, 0, 0}), geo::OutOfRange);
    CHECK_THROWS_AS(geo::wgs84_to_utm({0, 180.5, 0}), geo::OutOfRange);
    CHECK_THROWS_AS(geo::wgs84_to_utm({std::nan(""), 0, 0}), geo::OutOfRange);

    CHECK_THROWS_AS(geo::utm_to_wgs84({500000, 0, 0, 'N'}), geo::OutOfRange);       // zone
    CHECK_THROWS_AS(geo::utm_to_wgs84({50000, 0, 31, 'N'}), geo::OutOfRange);       // easting
    CHECK_THROWS_AS(geo::utm_to_wgs84({500000, -5, 31, 'N'}), geo::OutOfRange);     // northing
    CHECK_THROWS_AS(geo::utm_to_wgs84({500000, 0, 31, 'I'}), geo::OutOfRange);      // band
}

TEST_CASE("geo: site transform maps the origin to zero and is a similarity") {
    const auto site = geo::make_site_transform(1.2966, 103.7764, 10.0, 0.0, 1.0);
    const geo::LocalPoint o = geo::to_local({1.2966, 103.7764, 10.0}, site);
    CHECK(std::fabs(o.x) <= 1e-6);
    CHECK(std::fabs(o.y) <= 1e-6);
    CHECK(std::fabs(o.z) <= 1e-9);

    // ~111 m north per 0.001 degrees latitude at the equator
    const geo::LocalPoint n = geo::to_local({1.2976, 103.7764, 10.0}, site);
    CHECK(n.y == Catch::Approx(110.6).margin(1.0));
    CHECK(std::fabs(n.x) <= 1.0);

    // altitude maps straight through scale
    const geo::LocalPoint up = geo::to_local({1.2966, 103.7764, 13.5}, site);
    CHECK(up.z == Catch::Approx(3.5).margin(1e-9));
}

TEST_CASE("geo: rotation turns the local frame counter-clockwise") {
    const auto flat = geo::make_site_transform(1.2966, 103.7764, 0.0, 0.0, 1.0);
    const auto turned = geo::make_site_transform(1.2966, 103.7764, 0.0, 90.0, 1.0);
    const geo::GeoSample east{1.2966, 103.7864, 0.0};
    const geo::LocalPoint p0 = geo::to_local(east, flat);
    const geo::LocalPoint p9 = geo::to_local(east, turned);
    // with a 90 degree CCW frame rotation, +x maps onto +y
    CHECK(p9.y == Catch::Approx(p0.x).margin(1e-6));
    CHECK(p9.x == Catch::Approx(-p0.y).margin(1e-6));
}

TEST_CASE("geo: scale stretches distances uniformly") {
    const auto s1 = geo::make_site_transform(1.2966, 103.7764, 0.0, 33.0, 1.0);
    const auto s2 = geo::make_site_transform(1.2966, 103.7764, 0.0, 33.0, 2.5);
    const geo::GeoSample a{1.2970, 103.7770, 0.0}, b{1.2980, 103.7790, 0.0};
    const auto a1 = geo::to_local(a, s1), b1 = geo::to_local(b, s1);
    const auto a2 = geo::to_local(a, s2), b2 = geo::to_local(b, s2);
    const double d1 = std::hypot(b1.x - a1.x, b1.y - a1.y);
    const double d2 = std::hypot(b2.x - a2.x, b2.y - a2.y);
    CHECK(d2 == Catch::Approx(2.5 * d1).epsilon(1e-9));
}

TEST_CASE("geo: zone and hemisphere mismatches are reported") {
    const auto site = geo::make_site_transform(1.2966, 103.7764, 0.0, 0.0, 1.0);  // zone 48 N
    CHECK_THROWS_AS(geo::to_local({48.1, 11.6, 0.0}, site), geo::ZoneMismatch);   // zone 32
    CHECK_THROWS_AS(geo::to_local({-1.3, 103.7764, 0.0}, site), geo::ZoneMismatch);  // south
    CHECK_THROWS_AS(geo::make_site_transform(1, 103, 0, 0, 0.0), Error);  // bad scale
}

TEST_CASE("geo: calibration fit recovers a known similarity transform") {
    const auto truth = geo::make_site_transform(1.2966, 103.7764, 7.0, 25.0, 2.0);
    // forward-generate geo samples from chosen local points using the inverse map
    const double th = truth.rotation_deg * 3.14159265358979323846 / 180.0;
    struct L {
        double x, y, z;
    };
    const std::vector<L> locals = {{0, 0, 0}, {40, 0, 2}, {0, 30, 4}, {-25, 55, 1}, {80, -60, 3}};
    std::vector<geo::CalibrationPair> pairs;
    const double ca = std::cos(th), sa = std::sin(th);
    for (const auto& l : locals) {
        geo::UtmCoord u = truth.origin;
        u.easting += (ca * l.x + sa * l.y) / truth.scale;
        u.northing += (-sa * l.x + ca * l.y) / truth.scale;
        const geo::GeoSample g = geo::utm_to_wgs84(u, truth.origin_altitude + l.z / truth.scale);
        pairs.push_back({g, {l.x, l.y, l.z}});
    }

    const geo::FitResult fit = geo::fit_transform(pairs);
    CHECK(fit.transform.rotation_deg == Catch::Approx(25.0).margin(1e-6));
    CHECK(fit.transform.scale == Catch::Approx(2.0).epsilon(1e-8));
    CHECK(fit.transform.origin_altitude == Catch::Approx(7.0).margin(1e-6));
    CHECK(fit.max_residual_m <= 1e-6);
    CHECK(fit.rms_residual_m <= 1e-6);
    REQUIRE(fit.residuals_m.size() == pairs.size());

    for (const auto& p : pairs) {
        const geo::LocalPoint q = geo::to_local(p.geo, fit.transform);
        CHECK(std::fabs(q.x - p.local.x) <= 1e-6);
        CHECK(std::fabs(q.y - p.local.y) <= 1e-6);
        CHECK(std::fabs(q.z - p.local.z) <= 1e-6);
    }
}

TEST_CASE("geo: calibration fit input validation") {
    CHECK_THROWS_AS(geo::fit_transform({}), Error);
    CHECK_THROWS_AS(geo::fit_transform({{{1, 103, 0}, {0, 0, 0}}}), Error);
    // coincident points
    CHECK_THROWS_AS(
        geo::fit_transform({{{1.29, 103.77, 0}, {0, 0, 0}}, {{1.29, 103.77, 0}, {5, 5, 0}}}),
        Error);
    // pairs straddling two UTM zones
    CHECK_THROWS_AS(
        geo::fit_transform({{{1.29, 103.77, 0}, {0, 0, 0}}, {{48.1, 11.6, 0}, {9, 9, 0}}}),
        geo::ZoneMismatch);
}
