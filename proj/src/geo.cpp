#include "quadsky/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadsky::geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

ProjectedPoint Projection::to_meters(const GeoPoint& p) const {
    const double x = kEarthRadiusM * (p.lon - lon0) * kDegToRad * std::cos(lat0 * kDegToRad);
    const double y = kEarthRadiusM * (p.lat - lat0) * kDegToRad;
    return {x, y};
}

GeoPoint Projection::to_degrees(const ProjectedPoint& p) const {
    GeoPoint g;
    g.lat = lat0 + p.y / (kEarthRadiusM * kDegToRad);
    g.lon = lon0 + p.x / (kEarthRadiusM * kDegToRad * std::cos(lat0 * kDegToRad));
    return g;
}

Projection make_projection(const EntityCollection& collection) {
    if (collection.size() == 0) {
        throw std::invalid_argument("cannot build a projection for an empty collection");
    }
    double lat = 0.0, lon = 0.0;
    for (const auto& e : collection.entities()) {
        lat += e.point.lat;
        lon += e.point.lon;
    }
    return {lat / static_cast<double>(collection.size()),
            lon / static_cast<double>(collection.size())};
}

std::vector<ProjectedPoint> project(const EntityCollection& collection, const Projection& proj) {
    std::vector<ProjectedPoint> out;
    out.reserve(collection.size());
    for (const auto& e : collection.entities()) out.push_back(proj.to_meters(e.point));
    return out;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

}  // namespace quadsky::geo
