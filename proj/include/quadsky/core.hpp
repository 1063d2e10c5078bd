#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace quadsky {

/// Identity of an entity record: unique within a collection as a pair.
struct EntityId {
    std::string source;
    std::string id;

    auto operator<=>(const EntityId&) const = default;
};

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

/// One record from one location-based source.
///
/// `address`, `phone` and `website` are optional; `categories` holds
/// taxonomy term identifiers and may be empty. Instances are immutable
/// once they enter an EntityCollection.
struct SpatialEntity {
    EntityId key;
    GeoPoint point;
    std::string name;
    std::optional<std::string> address;
    std::vector<std::string> categories;
    std::optional<std::string> phone;    // normalized digit string
    std::optional<std::string> website;  // normalized host+path
};

struct BoundingBox {
    double min_lat = 0.0, max_lat = 0.0;
    double min_lon = 0.0, max_lon = 0.0;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
};

/// A validated, immutable set of spatial entities.
///
/// Construction checks coordinate ranges, non-empty names and
/// (source, id) uniqueness, and derives the bounding box. Datasets
/// spanning the antimeridian or reaching the poles are rejected.
class EntityCollection {
public:
    static EntityCollection from_entities(std::vector<SpatialEntity> entities);

    std::span<const SpatialEntity> entities() const { return entities_; }
    const SpatialEntity& at(std::size_t i) const { return entities_[i]; }
    std::size_t size() const { return entities_.size(); }
    const BoundingBox& bounds() const { return bounds_; }

    /// Index of the entity whose (source, id) matches, if present.
    std::optional<std::size_t> find(const EntityId& key) const;

    /// Rank of each entity in the lexicographic (source, id) order;
    /// used for canonical pair ordering without string compares.
    std::span<const std::uint32_t> canonical_ranks() const { return ranks_; }

private:
    std::vector<SpatialEntity> entities_;
    std::vector<std::uint32_t> ranks_;
    std::vector<std::uint32_t> order_;  // entity indices sorted by (source, id)
    BoundingBox bounds_;
};

/// Per-attribute similarities of one pair, all in [0, 1].
///
/// The attribute names are not stored per vector; every vector in a run
/// shares one dimension schema (see similarity::DimensionSchema) and the
/// schema is recorded in serialized output headers.
struct SimilarityVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    bool operator==(const SimilarityVector&) const = default;
};

/// An unordered entity pair in canonical order (left < right by (source, id)).
struct CandidatePair {
    EntityId left;
    EntityId right;
    SimilarityVector delta;               // empty until the compare stage
    std::optional<int> skyline_level;     // >= 1 once ranked
    std::optional<bool> truth;
    std::optional<bool> predicted;
};

/// Canonical (left, right) ordering for a pair of entity ids.
/// Symmetric in its arguments; throws std::invalid_argument on a self-pair.
CandidatePair canonicalize_pair(const EntityId& a, const EntityId& b);

/// Skyline levels produced by peeling, level 1 first. Levels hold indices
/// into the pair array they were computed from; they are disjoint and
/// cover it completely.
struct SkylinePartition {
    std::vector<std::vector<std::size_t>> levels;

    std::size_t level_count() const { return levels.size(); }
    std::size_t total_pairs() const;
};

enum class CutoffMethod { F, FES, D };

struct LevelMetrics {
    int k = 0;
    std::size_t level_size = 0;
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// A cut-off decision: positives are the pairs in levels 1..cutoff_k.
struct ClassificationResult {
    CutoffMethod method = CutoffMethod::F;
    int cutoff_k = 0;
    std::vector<std::size_t> positives;   // pair indices
    std::vector<std::size_t> negatives;   // pair indices
    std::vector<LevelMetrics> metric_series;  // empty for the label-free method
    int explored_levels = 0;
};

const char* to_string(CutoffMethod m);

}  // namespace quadsky
