#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/geo.hpp"

namespace quadsky::quadflex {

struct QuadParams {
    double max_diagonal_m = 100.0;  // m: split while diagonal exceeds this
    double max_density = std::numeric_limits<double>::infinity();  // d: entities per 1000 m^2
    int max_depth = 40;             // recursion guard
    double min_diagonal_m = 0.01;   // below this a node never splits

    bool density_limited() const { return std::isfinite(max_density); }
};

/// Axis-aligned rectangle in projected meters.
struct Rect {
    double x0 = 0.0, y0 = 0.0;  // lower-left corner
    double x1 = 0.0, y1 = 0.0;  // upper-right corner

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diagonal() const;
    double area() const { return width() * height(); }
    bool contains(const geo::ProjectedPoint& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

/// Children a point is assigned to: indices 1 (top-left), 2 (top-right),
/// 3 (bottom-left), 4 (bottom-right). Never empty for an in-region point.
struct ChildSet {
    std::uint8_t bits = 0;

    bool contains(int child) const { return bits & (1u << (child - 1)); }
    int count() const;
    std::array<int, 4> to_array() const;  // valid entries first, child order
};

struct QuadNode {
    Rect physical;                 // the node's quadrant
    Rect logical;                  // physical plus the overlap it accepts points from
    int depth = 0;                 // root is depth 0
    int first_child = -1;          // -1 for leaves; children are contiguous, order 1..4
    std::vector<std::uint32_t> entities;  // leaf payload (entity indices)

    bool is_leaf() const { return first_child < 0; }
};

/// A non-empty leaf emitted as a candidate block.
struct Block {
    int leaf_id = 0;
    std::vector<std::uint32_t> entities;
};

/// Quadtree variant that splits on diagonal and density caps and assigns
/// points near the split lines to more than one child, so that nearby
/// points are never separated by a block boundary.
class QuadFlex {
public:
    /// Builds the tree over projected points. The root covers the point
    /// bounding box (padded to a minimal extent when degenerate).
    /// Throws std::invalid_argument on an empty input or non-positive caps.
    static QuadFlex build(std::span<const geo::ProjectedPoint> points, const QuadParams& params);

    /// Child assignment for a point inside `node`'s logical region, by the
    /// lines at 0.25 and 0.75 of the node's width and height (inclusive on
    /// the lines themselves). Throws std::invalid_argument for an outside point.
    static ChildSet get_index(const QuadNode& node, const geo::ProjectedPoint& p);

    /// Non-empty leaves in stable depth-first order (children 1 to 4).
    std::vector<Block> leaves() const;

    const std::vector<QuadNode>& nodes() const { return nodes_; }
    const QuadParams& params() const { return params_; }
    int max_observed_depth() const { return max_observed_depth_; }

    /// Total leaf slots over all leaves divided by the point count;
    /// measures multi-assignment overhead.
    double replication_factor() const;

private:
    QuadParams params_;
    std::vector<QuadNode> nodes_;
    std::span<const geo::ProjectedPoint> points_;
    std::size_t point_count_ = 0;
    int max_observed_depth_ = 0;

    void insert(int node_idx, std::uint32_t entity, const geo::ProjectedPoint& p);
    void split(int node_idx);
    bool wants_split(const QuadNode& n) const;
};

/// Index pair in canonical (source, id) order; the building block of the
/// deduplicated candidate set.
struct IndexPair {
    std::uint32_t left = 0;
    std::uint32_t right = 0;

    bool operator==(const IndexPair&) const = default;
};

/// All within-block unordered pairs over all blocks, deduplicated on
/// canonical pair identity and sorted by it. Entity indices refer to the
/// collection the tree was built from.
std::vector<IndexPair> enumerate_index_pairs(const std::vector<Block>& blocks,
                                             const EntityCollection& collection);

/// Same, materialized as CandidatePair skeletons (no delta yet).
std::vector<CandidatePair> enumerate_pairs(const std::vector<Block>& blocks,
                                           const EntityCollection& collection);

}  // namespace quadsky::quadflex
