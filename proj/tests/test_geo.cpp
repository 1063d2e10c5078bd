#include <doctest.h>

#include <cmath>
#include <random>

#include "quadsky/geo.hpp"
#include "test_util.hpp"

using namespace quadsky;

namespace {
// R * pi / 180: meters per degree of latitude on the reference sphere.
constexpr double kMetersPerDegree = 111194.92664455873;
}

TEST_CASE("projection maps the centroid to the origin") {
    auto c = EntityCollection::from_entities({
        testutil::entity("s", "1", 56.9, 10.1, "A"),
        testutil::entity("s", "2", 57.1, 9.9, "B"),
    });
    const geo::Projection proj = geo::make_projection(c);
    CHECK(proj.lat0 == doctest::Approx(57.0));
    CHECK(proj.lon0 == doctest::Approx(10.0));
    const auto p = proj.to_meters({57.0, 10.0});
    CHECK(p.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection of one degree north is ~111.2 km") {
    const geo::Projection proj{50.0, 8.0};
    const auto p = proj.to_meters({51.0, 8.0});
    CHECK(p.y == doctest::Approx(kMetersPerDegree).epsilon(1e-9));
    CHECK(p.x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection of one degree east at 60N is ~55.6 km") {
    const geo::Projection proj{60.0, 8.0};
    const auto p = proj.to_meters({60.0, 9.0});
    CHECK(p.x == doctest::Approx(kMetersPerDegree * 0.5).epsilon(1e-9));
}

TEST_CASE("projection rejects an empty collection") {
    const EntityCollection empty;
    CHECK_THROWS_AS(geo::make_projection(empty), std::invalid_argument);
}

TEST_CASE("projection round-trips within 1e-6 degrees") {
    const geo::Projection proj{57.05, 10.05};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dlat(-0.5, 0.5), dlon(-0.5, 0.5);
    for (int i = 0; i < 500; ++i) {
        const GeoPoint g{57.05 + dlat(rng), 10.05 + dlon(rng)};
        const GeoPoint back = proj.to_degrees(proj.to_meters(g));
        CHECK(std::abs(back.lat - g.lat) < 1e-6);
        CHECK(std::abs(back.lon - g.lon) < 1e-6);
    }
}

TEST_CASE("haversine basics") {
    CHECK(geo::haversine_m({12.34, 56.78}, {12.34, 56.78}) == 0.0);
    CHECK(geo::haversine_m({0.0, 0.0}, {0.0, 1.0}) ==
          doctest::Approx(kMetersPerDegree).epsilon(1e-9));
    CHECK(geo::haversine_m({0.0, 0.0}, {1.0, 0.0}) ==
          doctest::Approx(kMetersPerDegree).epsilon(1e-9));
}

TEST_CASE("haversine is symmetric and satisfies the triangle inequality") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dlat(56.5, 57.5), dlon(9.5, 10.5);
    for (int i = 0; i < 300; ++i) {
        const GeoPoint a{dlat(rng), dlon(rng)};
        const GeoPoint b{dlat(rng), dlon(rng)};
        const GeoPoint c{dlat(rng), dlon(rng)};
        const double ab = geo::haversine_m(a, b);
        const double ba = geo::haversine_m(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        const double ac = geo::haversine_m(a, c);
        const double cb = geo::haversine_m(c, b);
        CHECK(ab <= (ac + cb) * (1.0 + 1e-6) + 1e-9);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("projected Euclidean distance tracks haversine within 0.1% near the equator") {
    // The fixed-cos scale matches the true east-west scale only near the
    // reference latitude, so the 1e-3 bound over a full 100 km radius holds
    // at low latitudes (tan(lat) small). High latitudes get a blocking-scale
    // bound below.
    const geo::Projection proj{3.0, 10.0};
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dlat(-0.85, 0.85), dlon(-0.85, 0.85);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{3.0 + dlat(rng), 10.0 + dlon(rng)};
        const GeoPoint b{3.0 + dlat(rng), 10.0 + dlon(rng)};
        if (geo::haversine_m({3.0, 10.0}, a) > 100000.0) continue;
        if (geo::haversine_m({3.0, 10.0}, b) > 100000.0) continue;
        const double hav = geo::haversine_m(a, b);
        if (hav < 1.0) continue;
        const auto pa = proj.to_meters(a);
        const auto pb = proj.to_meters(b);
        const double eucl = std::hypot(pa.x - pb.x, pa.y - pb.y);
        CHECK(std::abs(hav - eucl) / hav < 1e-3);
        ++checked;
    }
    CHECK(checked > 500);
}

TEST_CASE("projected distances stay accurate at blocking scale in the dataset region") {
    // Pairs up to 2 km apart, anywhere within 100 km of a 57N reference:
    // the worst-case scale error is tan(57) * (100 km / R), about 2.4%.
    const geo::Projection proj{57.0, 10.0};
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> dlat(-0.85, 0.85), dlon(-1.5, 1.5);
    std::uniform_real_distribution<double> step(-0.015, 0.015);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint a{57.0 + dlat(rng), 10.0 + dlon(rng)};
        if (geo::haversine_m({57.0, 10.0}, a) > 100000.0) continue;
        const GeoPoint b{a.lat + step(rng), a.lon + step(rng)};
        const double hav = geo::haversine_m(a, b);
        if (hav < 1.0) continue;
        const auto pa = proj.to_meters(a);
        const auto pb = proj.to_meters(b);
        const double eucl = std::hypot(pa.x - pb.x, pa.y - pb.y);
        CHECK(std::abs(hav - eucl) / hav < 0.03);
    }
}
