#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "quadsky/datagen.hpp"
#include "quadsky/geo.hpp"
#include "quadsky/quadflex.hpp"
#include "test_util.hpp"

using namespace quadsky;
using quadflex::Block;
using quadflex::QuadFlex;
using quadflex::QuadNode;
using quadflex::QuadParams;

namespace {

QuadNode unit_node(double w = 1.0, double h = 1.0) {
    QuadNode n;
    n.physical = {0.0, 0.0, w, h};
    n.logical = n.physical;
    return n;
}

EntityCollection grid_collection(const std::vector<geo::ProjectedPoint>& pts) {
    // Entities placed by meters offsets from a reference point.
    const geo::Projection proj{57.0, 10.0};
    std::vector<SpatialEntity> es;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const GeoPoint g = proj.to_degrees(pts[i]);
        es.push_back(testutil::entity("s1", "e" + std::to_string(i), g.lat, g.lon, "X"));
    }
    return EntityCollection::from_entities(std::move(es));
}

std::set<std::set<std::uint32_t>> block_shapes(const std::vector<Block>& blocks) {
    std::set<std::set<std::uint32_t>> out;
    for (const auto& b : blocks) out.insert({b.entities.begin(), b.entities.end()});
    return out;
}

}  // namespace

TEST_CASE("get_index assigns by the 0.25/0.75 lines") {
    const QuadNode n = unit_node();

    SUBCASE("core of child 1") {
        const auto s = QuadFlex::get_index(n, {0.1, 0.9});
        CHECK(s.count() == 1);
        CHECK(s.contains(1));
    }
    SUBCASE("node center belongs to all four children") {
        const auto s = QuadFlex::get_index(n, {0.5, 0.5});
        CHECK(s.count() == 4);
    }
    SUBCASE("top band midpoint belongs to both upper children") {
        const auto s = QuadFlex::get_index(n, {0.5, 0.9});
        CHECK(s.count() == 2);
        CHECK(s.contains(1));
        CHECK(s.contains(2));
    }
    SUBCASE("points exactly on a line go to both sides") {
        const auto s = QuadFlex::get_index(n, {0.75, 0.9});
        CHECK(s.contains(1));
        CHECK(s.contains(2));
    }
    SUBCASE("result is never empty anywhere in the node") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 500; ++i) {
            CHECK(QuadFlex::get_index(n, {u(rng), u(rng)}).count() >= 1);
        }
    }
    SUBCASE("outside the logical region throws") {
        CHECK_THROWS_AS(QuadFlex::get_index(n, {1.5, 0.5}), std::invalid_argument);
    }
}

TEST_CASE("two nearby entities stay in a single root leaf") {
    std::vector<geo::ProjectedPoint> pts{{0.0, 0.0}, {10.0, 0.0}};
    QuadParams params;
    params.max_diagonal_m = 100.0;
    const auto tree = QuadFlex::build(pts, params);
    const auto blocks = tree.leaves();
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].entities.size() == 2);
    CHECK(tree.max_observed_depth() == 0);
}

TEST_CASE("distant entities split apart and produce no candidate pair") {
    std::vector<geo::ProjectedPoint> pts{{0.0, 0.0}, {1000.0, 1000.0}};
    QuadParams params;
    params.max_diagonal_m = 100.0;
    const auto tree = QuadFlex::build(pts, params);
    const auto blocks = tree.leaves();
    CHECK(blocks.size() == 2);
    for (const auto& b : blocks) CHECK(b.entities.size() == 1);

    const auto collection = grid_collection(pts);
    CHECK(quadflex::enumerate_pairs(blocks, collection).empty());
    CHECK(datagen::oracle_fnn(collection, 100.0).empty());
}

TEST_CASE("density cap bounds every multi-entity leaf") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    std::vector<geo::ProjectedPoint> pts(1000);
    for (auto& p : pts) p = {u(rng), u(rng)};
    QuadParams params;
    params.max_diagonal_m = 1e6;
    params.max_density = 10.0;  // entities per 1000 m^2
    const auto tree = QuadFlex::build(pts, params);

    for (const auto& n : tree.nodes()) {
        if (!n.is_leaf() || n.entities.size() < 2) continue;
        const double density = static_cast<double>(n.entities.size()) * 1000.0 /
                               n.physical.area();
        CHECK(density <= 10.0 + 1e-9);
    }
}

TEST_CASE("multi-entity leaves satisfy both caps unless guarded") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(0.0, 3000.0);
    std::vector<geo::ProjectedPoint> pts(1500);
    for (auto& p : pts) p = {u(rng), u(rng)};
    QuadParams params;
    params.max_diagonal_m = 120.0;
    params.max_density = 25.0;
    const auto tree = QuadFlex::build(pts, params);

    for (const auto& n : tree.nodes()) {
        if (!n.is_leaf() || n.entities.size() < 2) continue;
        if (n.depth >= params.max_depth) continue;
        if (n.physical.diagonal() < params.min_diagonal_m) continue;
        CHECK(n.physical.diagonal() <= params.max_diagonal_m + 1e-9);
        const double density = static_cast<double>(n.entities.size()) * 1000.0 /
                               n.physical.area();
        CHECK(density <= params.max_density + 1e-9);
    }
}

TEST_CASE("leaves come out in stable depth-first order and keep membership in range") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> u(0.0, 400.0);
    std::vector<geo::ProjectedPoint> pts(300);
    for (auto& p : pts) p = {u(rng), u(rng)};
    QuadParams params;
    params.max_diagonal_m = 60.0;
    const auto tree = QuadFlex::build(pts, params);
    const auto blocks = tree.leaves();
    REQUIRE(!blocks.empty());
    for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(blocks[i].leaf_id == static_cast<int>(i));

    // Every member point lies inside its leaf's logical region.
    std::size_t leaf_cursor = 0;
    for (const auto& n : tree.nodes()) {
        if (!n.is_leaf() || n.entities.empty()) continue;
        (void)leaf_cursor;
        for (std::uint32_t e : n.entities) CHECK(n.logical.contains(pts[e]));
    }
}

TEST_CASE("a point near a split line lands in several blocks") {
    // Corner anchors fix the bounding box; the probe points sit at the box
    // center, inside the shared overlap of all four children.
    std::vector<geo::ProjectedPoint> pts{{0.0, 0.0}, {1000.0, 1000.0}, {500.0, 500.0},
                                         {500.1, 500.1}};
    QuadParams params;
    params.max_diagonal_m = 100.0;
    const auto tree = QuadFlex::build(pts, params);
    const auto blocks = tree.leaves();
    int appearances = 0;
    for (const auto& b : blocks) {
        appearances += static_cast<int>(std::count(b.entities.begin(), b.entities.end(), 2u));
    }
    CHECK(appearances >= 2);
}

TEST_CASE("duplicate coordinates stop at the depth guard and share a leaf") {
    std::vector<geo::ProjectedPoint> pts{{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
    QuadParams params;
    params.max_diagonal_m = 0.5;  // forces splitting; identical points never separate
    const auto tree = QuadFlex::build(pts, params);
    const auto blocks = tree.leaves();
    bool found_all_three = false;
    for (const auto& b : blocks) {
        if (b.entities.size() == 3) found_all_three = true;
    }
    CHECK(found_all_three);
    CHECK(tree.max_observed_depth() <= params.max_depth);
}

TEST_CASE("enumerate_pairs forms within-block pairs with global dedup") {
    const auto collection = grid_collection({{0, 0}, {1, 0}, {2, 0}, {3, 0}});

    SUBCASE("one block of three yields three pairs") {
        std::vector<Block> blocks{{0, {0, 1, 2}}};
        const auto pairs = quadflex::enumerate_pairs(blocks, collection);
        CHECK(pairs.size() == 3);
    }
    SUBCASE("the same block twice yields each pair once") {
        std::vector<Block> blocks{{0, {0, 1}}, {1, {1, 0}}};
        const auto pairs = quadflex::enumerate_pairs(blocks, collection);
        CHECK(pairs.size() == 1);
        CHECK(pairs[0].left.id == "e0");
        CHECK(pairs[0].right.id == "e1");
    }
    SUBCASE("no cross-block pairs") {
        std::vector<Block> blocks{{0, {0, 1}}, {1, {1, 2}}};
        const auto pairs = quadflex::enumerate_pairs(blocks, collection);
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0].left.id == "e0");
        CHECK(pairs[0].right.id == "e1");
        CHECK(pairs[1].left.id == "e1");
        CHECK(pairs[1].right.id == "e2");
    }
}

TEST_CASE("tree shape is independent of insertion order") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(0.0, 800.0);
    std::vector<geo::ProjectedPoint> pts(400);
    for (auto& p : pts) p = {u(rng), u(rng)};
    QuadParams params;
    params.max_diagonal_m = 90.0;
    params.max_density = 40.0;

    const auto blocks_a = QuadFlex::build(pts, params).leaves();

    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<geo::ProjectedPoint> shuffled(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = pts[perm[i]];
    const auto blocks_b_raw = QuadFlex::build(shuffled, params).leaves();

    // Map the shuffled indices back before comparing block membership.
    std::vector<Block> blocks_b = blocks_b_raw;
    for (auto& b : blocks_b) {
        for (auto& e : b.entities) e = static_cast<std::uint32_t>(perm[e]);
    }
    CHECK(block_shapes(blocks_a) == block_shapes(blocks_b));
}

TEST_CASE("depth stays within the pairwise-distance bound") {
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> u(0.0, 2000.0);
    std::vector<geo::ProjectedPoint> pts(250);
    for (auto& p : pts) p = {u(rng), u(rng)};

    double c = 1e18;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            c = std::min(c, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
        }
    }
    REQUIRE(c > 0.0);

    QuadParams params;
    params.max_diagonal_m = 25.0;
    const auto tree = QuadFlex::build(pts, params);
    const double root_diag = tree.nodes()[0].physical.diagonal();
    const int bound = static_cast<int>(std::ceil(std::log2(root_diag / c))) + 2;
    CHECK(tree.max_observed_depth() <= bound);
}

TEST_CASE("replication stays near the depth-linear estimate") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(0.0, 5000.0);
    std::vector<geo::ProjectedPoint> pts(2000);
    for (auto& p : pts) p = {u(rng), u(rng)};
    QuadParams params;
    params.max_diagonal_m = 100.0;
    const auto tree = QuadFlex::build(pts, params);
    CHECK(tree.replication_factor() >= 1.0);
    CHECK(tree.replication_factor() <= 4.0 * (tree.max_observed_depth() + 1));
}

TEST_CASE("blocking covers nearly all fixed-radius neighbor pairs") {
    datagen::GenParams gp;
    gp.n = 2000;
    gp.dup_rate = 0.0;
    gp.hotspot_fraction = 0.0;  // uniform points
    gp.area = {57.00, 57.045, 9.90, 9.983};  // ~5 km square
    gp.seed = 4242;
    const auto ds = datagen::generate(gp);

    const auto proj = geo::make_projection(ds.collection);
    const auto pts = geo::project(ds.collection, proj);
    QuadParams params;
    params.max_diagonal_m = 100.0;
    const auto blocks = QuadFlex::build(pts, params).leaves();
    const auto candidate = quadflex::enumerate_index_pairs(blocks, ds.collection);
    const auto oracle = datagen::oracle_fnn(ds.collection, 100.0);
    REQUIRE(!oracle.empty());

    std::set<std::pair<std::uint32_t, std::uint32_t>> cand_set;
    for (const auto& p : candidate) cand_set.emplace(p.left, p.right);
    std::size_t covered = 0;
    for (const auto& p : oracle) {
        covered += cand_set.count({p.left, p.right}) ? 1 : 0;
    }
    const double coverage = static_cast<double>(covered) / static_cast<double>(oracle.size());
    CHECK(coverage >= 0.99);
}

TEST_CASE("build rejects bad inputs") {
    QuadParams params;
    CHECK_THROWS_AS(QuadFlex::build({}, params), std::invalid_argument);
    std::vector<geo::ProjectedPoint> pts{{0, 0}};
    params.max_diagonal_m = 0.0;
    CHECK_THROWS_AS(QuadFlex::build(pts, params), std::invalid_argument);
    params.max_diagonal_m = 100.0;
    params.max_density = -1.0;
    CHECK_THROWS_AS(QuadFlex::build(pts, params), std::invalid_argument);
}
