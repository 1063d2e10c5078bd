#include "quadsky/quadflex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace quadsky::quadflex {

namespace {
// Degenerate bounding boxes (collinear or identical points) get a minimal
// extent so node areas and densities stay well defined.
constexpr double kMinExtentM = 1.0;
}  // namespace

double Rect::diagonal() const { return std::hypot(width(), height()); }

int ChildSet::count() const {
    int n = 0;
    for (int c = 1; c <= 4; ++c) n += contains(c) ? 1 : 0;
    return n;
}

std::array<int, 4> ChildSet::to_array() const {
    std::array<int, 4> out{0, 0, 0, 0};
    int n = 0;
    for (int c = 1; c <= 4; ++c)
        if (contains(c)) out[n++] = c;
    return out;
}

ChildSet QuadFlex::get_index(const QuadNode& node, const geo::ProjectedPoint& p) {
    if (!node.logical.contains(p)) {
        throw std::invalid_argument("point outside the node's logical region");
    }
    const double x = p.x - node.physical.x0;
    const double y = p.y - node.physical.y0;
    const double w = node.physical.width();
    const double h = node.physical.height();
    // Assignment lines at 0.25 and 0.75 of the node's extent, inclusive.
    // Each child's catchment is additionally capped at the node's own box:
    // overlap fringes inherited from an ancestor split do not propagate, or
    // the catchments would compound and leaves would collect members far
    // outside their region.
    const bool left = x <= 0.75 * w && x >= 0.0;   // children 1, 3
    const bool right = x >= 0.25 * w && x <= w;    // children 2, 4
    const bool top = y >= 0.25 * h && y <= h;      // children 1, 2
    const bool bottom = y <= 0.75 * h && y >= 0.0; // children 3, 4

    ChildSet s;
    if (left && top) s.bits |= 1u << 0;
    if (right && top) s.bits |= 1u << 1;
    if (left && bottom) s.bits |= 1u << 2;
    if (right && bottom) s.bits |= 1u << 3;
    return s;
}

bool QuadFlex::wants_split(const QuadNode& n) const {
    if (n.entities.size() < 2) return false;
    if (n.depth >= params_.max_depth) return false;
    const double diag = n.physical.diagonal();
    if (diag < params_.min_diagonal_m) return false;
    if (diag > params_.max_diagonal_m) return true;
    if (params_.density_limited()) {
        const double per_1000m2 =
            static_cast<double>(n.entities.size()) * 1000.0 / n.physical.area();
        if (per_1000m2 > params_.max_density) return true;
    }
    return false;
}

void QuadFlex::split(int node_idx) {
    const Rect phys = nodes_[node_idx].physical;
    const int depth = nodes_[node_idx].depth;
    const double xm = phys.x0 + phys.width() / 2.0;
    const double ym = phys.y0 + phys.height() / 2.0;
    const double vleft = phys.x0 + 0.25 * phys.width();
    const double vright = phys.x0 + 0.75 * phys.width();
    const double hdown = phys.y0 + 0.25 * phys.height();
    const double hup = phys.y0 + 0.75 * phys.height();

    const int first = static_cast<int>(nodes_.size());
    nodes_[node_idx].first_child = first;

    auto make_child = [&](Rect p, Rect l) {
        QuadNode c;
        c.physical = p;
        c.logical = l;
        c.depth = depth + 1;
        nodes_.push_back(std::move(c));
    };
    // Child order 1..4: top-left, top-right, bottom-left, bottom-right.
    // Each logical region is the child's quadrant extended to the 0.25/0.75
    // assignment lines and capped at the parent's own box, matching
    // get_index; assignment and containment agree.
    make_child({phys.x0, ym, xm, phys.y1}, {phys.x0, hdown, vright, phys.y1});
    make_child({xm, ym, phys.x1, phys.y1}, {vleft, hdown, phys.x1, phys.y1});
    make_child({phys.x0, phys.y0, xm, ym}, {phys.x0, phys.y0, vright, hup});
    make_child({xm, phys.y0, phys.x1, ym}, {vleft, phys.y0, phys.x1, hup});
    max_observed_depth_ = std::max(max_observed_depth_, depth + 1);

    std::vector<std::uint32_t> members = std::move(nodes_[node_idx].entities);
    nodes_[node_idx].entities.clear();
    for (std::uint32_t e : members) {
        const ChildSet targets = get_index(nodes_[node_idx], points_[e]);
        for (int c = 1; c <= 4; ++c) {
            if (targets.contains(c)) insert(first + c - 1, e, points_[e]);
        }
    }
}

void QuadFlex::insert(int node_idx, std::uint32_t entity, const geo::ProjectedPoint& p) {
    if (!nodes_[node_idx].is_leaf()) {
        const ChildSet targets = get_index(nodes_[node_idx], p);
        const int first = nodes_[node_idx].first_child;
        for (int c = 1; c <= 4; ++c) {
            if (targets.contains(c)) insert(first + c - 1, entity, p);
        }
        return;
    }
    nodes_[node_idx].entities.push_back(entity);
    if (wants_split(nodes_[node_idx])) split(node_idx);
}

QuadFlex QuadFlex::build(std::span<const geo::ProjectedPoint> points, const QuadParams& params) {
    if (points.empty()) throw std::invalid_argument("cannot build QuadFlex over an empty collection");
    if (!(params.max_diagonal_m > 0.0)) throw std::invalid_argument("diagonal cap must be positive");
    if (!(params.max_density > 0.0)) throw std::invalid_argument("density cap must be positive");

    QuadFlex q;
    q.params_ = params;
    q.points_ = points;
    q.point_count_ = points.size();

    double x0 = points[0].x, x1 = points[0].x, y0 = points[0].y, y1 = points[0].y;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    if (x1 - x0 < kMinExtentM) {
        const double pad = (kMinExtentM - (x1 - x0)) / 2.0;
        x0 -= pad;
        x1 += pad;
    }
    if (y1 - y0 < kMinExtentM) {
        const double pad = (kMinExtentM - (y1 - y0)) / 2.0;
        y0 -= pad;
        y1 += pad;
    }

    QuadNode root;
    root.physical = {x0, y0, x1, y1};
    root.logical = root.physical;
    root.depth = 0;
    q.nodes_.push_back(std::move(root));

    for (std::uint32_t i = 0; i < points.size(); ++i) q.insert(0, i, points[i]);
    return q;
}

std::vector<Block> QuadFlex::leaves() const {
    std::vector<Block> out;
    int next_id = 0;
    // Iterative DFS preserving child order 1..4.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const QuadNode& n = nodes_[idx];
        if (n.is_leaf()) {
            if (!n.entities.empty()) out.push_back({next_id++, n.entities});
        } else {
            for (int c = 3; c >= 0; --c) stack.push_back(n.first_child + c);
        }
    }
    return out;
}

double QuadFlex::replication_factor() const {
    std::size_t slots = 0;
    for (const auto& n : nodes_) {
        if (n.is_leaf()) slots += n.entities.size();
    }
    return static_cast<double>(slots) / static_cast<double>(point_count_);
}

std::vector<IndexPair> enumerate_index_pairs(const std::vector<Block>& blocks,
                                             const EntityCollection& collection) {
    const auto ranks = collection.canonical_ranks();
    std::size_t upper = 0;
    for (const auto& b : blocks) upper += b.entities.size() * (b.entities.size() - 1) / 2;

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(upper + 1);
    std::vector<IndexPair> out;
    for (const auto& b : blocks) {
        const auto& es = b.entities;
        for (std::size_t i = 0; i + 1 < es.size(); ++i) {
            for (std::size_t j = i + 1; j < es.size(); ++j) {
                std::uint32_t a = es[i], c = es[j];
                if (ranks[a] > ranks[c]) std::swap(a, c);
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(ranks[a]) << 32) | ranks[c];
                if (seen.insert(key).second) out.push_back({a, c});
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const IndexPair& p, const IndexPair& q) {
        if (ranks[p.left] != ranks[q.left]) return ranks[p.left] < ranks[q.left];
        return ranks[p.right] < ranks[q.right];
    });
    return out;
}

std::vector<CandidatePair> enumerate_pairs(const std::vector<Block>& blocks,
                                           const EntityCollection& collection) {
    const auto idx_pairs = enumerate_index_pairs(blocks, collection);
    std::vector<CandidatePair> out;
    out.reserve(idx_pairs.size());
    for (const auto& ip : idx_pairs) {
        CandidatePair p;
        p.left = collection.at(ip.left).key;
        p.right = collection.at(ip.right).key;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace quadsky::quadflex
