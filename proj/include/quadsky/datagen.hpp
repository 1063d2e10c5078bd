#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/quadflex.hpp"
#include "quadsky/similarity.hpp"

namespace quadsky::datagen {

/// Perturbations applied to planted duplicates.
struct NoiseSpec {
    double name_edit_rate = 0.04;      // per-character edit probability
    double coord_jitter_m = 15.0;      // Gaussian std of the position offset
    double address_variant_prob = 0.3; // suffix/variant edit (inclusion, 0.9)
    double address_change_prob = 0.05; // different street number (0.0)
    double category_swap_prob = 0.25;  // per-term swap to a taxonomy sibling
    double keep_phone_prob = 0.7;
    double keep_website_prob = 0.7;
};

struct GenParams {
    std::size_t n = 1000;      // base entities
    int sources = 2;
    double dup_rate = 0.2;     // duplicates per base entity
    BoundingBox area{57.00, 57.18, 9.90, 10.20};
    double hotspot_fraction = 0.3;  // base entities drawn from dense clusters
    std::size_t hotspots = 0;       // 0: scaled from n
    double hotspot_std_m = 50.0;
    NoiseSpec noise;
    std::uint64_t seed = 1;
};

struct Dataset {
    EntityCollection collection;
    std::vector<std::pair<EntityId, EntityId>> truth_pairs;  // canonical, sorted
    similarity::Taxonomy taxonomy;
    std::vector<std::pair<std::string, std::string>> taxonomy_edges;  // child, parent

    bool is_truth(const EntityId& a, const EntityId& b) const;
};

/// Multi-source entities with planted duplicates and the generated taxonomy
/// their categories come from. Deterministic in the seed (per-entity derived
/// seeds), regardless of caller parallelism.
Dataset generate(const GenParams& params);

/// Fixed-radius nearest neighbors by exhaustive scan: every canonical pair
/// within `radius_m` meters (great-circle).
std::vector<quadflex::IndexPair> oracle_fnn(const EntityCollection& collection, double radius_m);

/// Reference skyline levels (1-based, per vector), computed by a dominator-
/// chain recurrence rather than peeling: level(v) = 1 + max level over the
/// vectors that dominate v.
std::vector<int> oracle_skyline(std::span<const SimilarityVector> vectors);

}  // namespace quadsky::datagen
