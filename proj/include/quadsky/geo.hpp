#pragma once

#include <vector>

#include "quadsky/core.hpp"

namespace quadsky::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct ProjectedPoint {
    double x = 0.0;  // meters east of the reference point
    double y = 0.0;  // meters north of the reference point
};

/// Equirectangular projection about a fixed reference point.
/// Adequate for region-scale datasets; error is negligible at blocking scale.
struct Projection {
    double lat0 = 0.0;  // reference latitude, degrees
    double lon0 = 0.0;  // reference longitude, degrees

    ProjectedPoint to_meters(const GeoPoint& p) const;
    GeoPoint to_degrees(const ProjectedPoint& p) const;
};

/// Projection centered on the collection centroid (mean of entity points).
/// Throws std::invalid_argument on an empty collection.
Projection make_projection(const EntityCollection& collection);

/// Projects every entity point; order follows the collection.
std::vector<ProjectedPoint> project(const EntityCollection& collection, const Projection& proj);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

}  // namespace quadsky::geo
