#include "quadsky/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quadsky/geo.hpp"

namespace quadsky::datagen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t stream, std::uint64_t item) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream * 0x100000001b3ULL + item)));
}

const std::vector<std::string>& syllables() {
    static const std::vector<std::string> s{"ka", "ro",  "lin",  "ber", "sol",  "mar",
                                            "hav", "sten", "bak", "lund", "gro", "nis",
                                            "tor", "vig", "dal",  "holm", "skov", "strand"};
    return s;
}

const std::vector<std::string>& type_words() {
    static const std::vector<std::string> s{"Grill",  "Cafe",   "Bar",    "Hotel", "Salon",
                                            "Marked", "Pizzeria", "Bageri", "Kiosk", "Garage"};
    return s;
}

std::string make_word(std::mt19937_64& rng, int min_syll, int max_syll) {
    std::uniform_int_distribution<int> count(min_syll, max_syll);
    std::uniform_int_distribution<std::size_t> pick(0, syllables().size() - 1);
    std::string w;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) w += syllables()[pick(rng)];
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
}

std::vector<std::pair<std::string, std::string>> builtin_taxonomy_edges() {
    const std::vector<std::string> groups{"food", "retail", "services",
                                          "leisure", "health", "transport"};
    std::vector<std::pair<std::string, std::string>> edges;
    edges.emplace_back("place", "ROOT");
    for (const auto& g : groups) {
        edges.emplace_back(g, "place");
        for (int m = 1; m <= 4; ++m) {
            const std::string mid = g + "-" + std::to_string(m);
            edges.emplace_back(mid, g);
            for (int l = 1; l <= 5; ++l) {
                edges.emplace_back(mid + "-" + std::to_string(l), mid);
            }
        }
    }
    return edges;
}

std::string mutate_name(const std::string& name, double edit_rate, std::mt19937_64& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> op(0, 2);
    std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
    std::string out;
    out.reserve(name.size() + 4);
    for (char c : name) {
        if (coin(rng) < edit_rate) {
            switch (op(rng)) {
                case 0: out.push_back(alphabet[letter(rng)]); break;              // substitute
                case 1: out.push_back(c); out.push_back(alphabet[letter(rng)]); break;  // insert
                case 2: break;                                                    // delete
            }
        } else {
            out.push_back(c);
        }
    }
    if (out.empty()) out = name.substr(0, 1);
    return out;
}

GeoPoint jitter(const GeoPoint& p, double std_m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std_m);
    const double dy = gauss(rng);
    const double dx = gauss(rng);
    constexpr double meters_per_deg = geo::kEarthRadiusM * std::numbers::pi / 180.0;
    GeoPoint out;
    out.lat = p.lat + dy / meters_per_deg;
    out.lon = p.lon + dx / (meters_per_deg * std::cos(p.lat * std::numbers::pi / 180.0));
    return out;
}

}  // namespace

bool Dataset::is_truth(const EntityId& a, const EntityId& b) const {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return std::binary_search(truth_pairs.begin(), truth_pairs.end(), key);
}

Dataset generate(const GenParams& params) {
    if (params.n == 0) throw std::invalid_argument("generator needs n > 0");
    if (params.dup_rate < 0.0 || params.dup_rate > 1.0) {
        throw std::invalid_argument("dup_rate must lie in [0, 1]");
    }
    if (params.sources < 1) throw std::invalid_argument("generator needs at least one source");
    if (params.hotspot_fraction < 0.0 || params.hotspot_fraction > 1.0) {
        throw std::invalid_argument("hotspot_fraction must lie in [0, 1]");
    }

    Dataset ds;
    ds.taxonomy_edges = builtin_taxonomy_edges();
    ds.taxonomy = similarity::Taxonomy::from_edges(ds.taxonomy_edges);
    const std::vector<std::string> leaves = ds.taxonomy.leaf_terms();

    const std::size_t n = params.n;
    const std::size_t hotspot_count =
        params.hotspots > 0
            ? params.hotspots
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::llround(
                         static_cast<double>(n) * params.hotspot_fraction / 6.0)));

    // Hotspot centers, street pool and the duplicate plan come from
    // dedicated streams so per-entity draws stay independent of them.
    auto plan_rng = rng_for(params.seed, 1, 0);
    std::vector<GeoPoint> centers(hotspot_count);
    {
        const double mlat = 0.05 * (params.area.max_lat - params.area.min_lat);
        const double mlon = 0.05 * (params.area.max_lon - params.area.min_lon);
        std::uniform_real_distribution<double> ulat(params.area.min_lat + mlat,
                                                    params.area.max_lat - mlat);
        std::uniform_real_distribution<double> ulon(params.area.min_lon + mlon,
                                                    params.area.max_lon - mlon);
        for (auto& c : centers) c = {ulat(plan_rng), ulon(plan_rng)};
    }
    const std::size_t street_count = std::max<std::size_t>(10, n / 20);
    std::vector<std::string> streets(street_count);
    {
        static const std::vector<std::string> suffix{"gade", "vej", "alle", "torv"};
        std::uniform_int_distribution<std::size_t> pick(0, suffix.size() - 1);
        for (auto& s : streets) s = make_word(plan_rng, 2, 3) + suffix[pick(plan_rng)];
    }

    std::vector<SpatialEntity> entities;
    entities.reserve(n + static_cast<std::size_t>(std::llround(params.dup_rate * n)) + 1);

    for (std::size_t i = 0; i < n; ++i) {
        auto rng = rng_for(params.seed, 2, i);
        std::uniform_real_distribution<double> coin(0.0, 1.0);

        SpatialEntity e;
        e.key.source = "s" + std::to_string(static_cast<int>(i % params.sources) + 1);
        e.key.id = "e" + std::to_string(i);
        if (coin(rng) < params.hotspot_fraction) {
            std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
            GeoPoint p = jitter(centers[pick(rng)], params.hotspot_std_m, rng);
            p.lat = std::clamp(p.lat, params.area.min_lat, params.area.max_lat);
            p.lon = std::clamp(p.lon, params.area.min_lon, params.area.max_lon);
            e.point = p;
        } else {
            std::uniform_real_distribution<double> ulat(params.area.min_lat, params.area.max_lat);
            std::uniform_real_distribution<double> ulon(params.area.min_lon, params.area.max_lon);
            e.point = {ulat(rng), ulon(rng)};
        }
        e.name = make_word(rng, 2, 3);
        std::uniform_int_distribution<std::size_t> type_pick(0, type_words().size() - 1);
        e.name += " " + type_words()[type_pick(rng)];

        {
            std::uniform_int_distribution<std::size_t> street(0, streets.size() - 1);
            std::uniform_int_distribution<int> number(1, 99);
            e.address = streets[street(rng)] + " " + std::to_string(number(rng));
        }
        std::uniform_int_distribution<int> cat_count(1, 3);
        std::uniform_int_distribution<std::size_t> cat_pick(0, leaves.size() - 1);
        const int cats = cat_count(rng);
        for (int c = 0; c < cats; ++c) e.categories.push_back(leaves[cat_pick(rng)]);
        std::sort(e.categories.begin(), e.categories.end());
        e.categories.erase(std::unique(e.categories.begin(), e.categories.end()),
                           e.categories.end());
        if (coin(rng) < 0.9) {
            std::string phone;
            std::uniform_int_distribution<int> digit(0, 9);
            for (int d = 0; d < 8; ++d) phone.push_back(static_cast<char>('0' + digit(rng)));
            e.phone = phone;
        }
        if (coin(rng) < 0.8) {
            std::string host = e.name.substr(0, e.name.find(' '));
            std::transform(host.begin(), host.end(), host.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            e.website = host + std::to_string(i) + ".dk";
        }
        entities.push_back(std::move(e));
    }

    // Duplicate plan: distinct bases, chosen deterministically.
    const std::size_t dup_count =
        static_cast<std::size_t>(std::llround(params.dup_rate * static_cast<double>(n)));
    std::vector<std::size_t> bases(n);
    std::iota(bases.begin(), bases.end(), std::size_t{0});
    std::shuffle(bases.begin(), bases.end(), plan_rng);
    bases.resize(std::min(dup_count, n));

    for (std::size_t j = 0; j < bases.size(); ++j) {
        const SpatialEntity& base = entities[bases[j]];
        auto rng = rng_for(params.seed, 3, bases[j]);
        std::uniform_real_distribution<double> coin(0.0, 1.0);

        SpatialEntity d;
        const int base_source = static_cast<int>(bases[j] % params.sources);
        int new_source = base_source;
        if (params.sources > 1) {
            std::uniform_int_distribution<int> shift(1, params.sources - 1);
            new_source = (base_source + shift(rng)) % params.sources;
        }
        d.key.source = "s" + std::to_string(new_source + 1);
        d.key.id = base.key.id + "d" + std::to_string(j);
        {
            GeoPoint p = jitter(base.point, params.noise.coord_jitter_m, rng);
            p.lat = std::clamp(p.lat, params.area.min_lat, params.area.max_lat);
            p.lon = std::clamp(p.lon, params.area.min_lon, params.area.max_lon);
            d.point = p;
        }
        d.name = mutate_name(base.name, params.noise.name_edit_rate, rng);
        if (base.address) {
            const double roll = coin(rng);
            if (roll < params.noise.address_change_prob) {
                const std::size_t cut = base.address->rfind(' ');
                std::uniform_int_distribution<int> number(100, 199);
                d.address = base.address->substr(0, cut) + " " + std::to_string(number(rng));
            } else if (roll < params.noise.address_change_prob + params.noise.address_variant_prob) {
                d.address = *base.address + " denmark";
            } else {
                d.address = base.address;
            }
        }
        for (const auto& cat : base.categories) {
            if (coin(rng) < params.noise.category_swap_prob) {
                const auto sibs = ds.taxonomy.siblings(cat);
                if (!sibs.empty()) {
                    std::uniform_int_distribution<std::size_t> pick(0, sibs.size() - 1);
                    d.categories.push_back(sibs[pick(rng)]);
                    continue;
                }
            }
            d.categories.push_back(cat);
        }
        std::sort(d.categories.begin(), d.categories.end());
        d.categories.erase(std::unique(d.categories.begin(), d.categories.end()),
                           d.categories.end());
        if (base.phone && coin(rng) < params.noise.keep_phone_prob) d.phone = base.phone;
        if (base.website && coin(rng) < params.noise.keep_website_prob) d.website = base.website;

        const CandidatePair canon = canonicalize_pair(base.key, d.key);
        ds.truth_pairs.emplace_back(canon.left, canon.right);
        entities.push_back(std::move(d));
    }
    std::sort(ds.truth_pairs.begin(), ds.truth_pairs.end());

    ds.collection = EntityCollection::from_entities(std::move(entities));
    return ds;
}

std::vector<quadflex::IndexPair> oracle_fnn(const EntityCollection& collection, double radius_m) {
    if (!(radius_m > 0.0)) throw std::invalid_argument("radius must be positive");
    const auto ranks = collection.canonical_ranks();
    std::vector<quadflex::IndexPair> out;
    const std::size_t n = collection.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (geo::haversine_m(collection.at(i).point, collection.at(j).point) <= radius_m) {
                std::uint32_t a = static_cast<std::uint32_t>(i);
                std::uint32_t b = static_cast<std::uint32_t>(j);
                if (ranks[a] > ranks[b]) std::swap(a, b);
                out.push_back({a, b});
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const quadflex::IndexPair& p, const quadflex::IndexPair& q) {
        if (ranks[p.left] != ranks[q.left]) return ranks[p.left] < ranks[q.left];
        return ranks[p.right] < ranks[q.right];
    });
    return out;
}

std::vector<int> oracle_skyline(std::span<const SimilarityVector> vectors) {
    const std::size_t n = vectors.size();
    std::vector<int> level(n, 1);
    if (n == 0) return level;
    std::vector<double> sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < vectors[i].size(); ++k) sums[i] += vectors[i][k];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Sum-descending with a lexicographic tie-break: a dominator's rounded
    // sum is >= the dominated vector's, and on equal sums the dominator is
    // lexicographically greater, so dominators always precede.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) return sums[a] > sums[b];
        return std::lexicographical_compare(vectors[b].values.begin(), vectors[b].values.end(),
                                            vectors[a].values.begin(), vectors[a].values.end());
    });

    auto dominates = [&](std::size_t a, std::size_t b) {
        bool strict = false;
        for (std::size_t k = 0; k < vectors[a].size(); ++k) {
            if (vectors[a][k] < vectors[b][k]) return false;
            if (vectors[a][k] > vectors[b][k]) strict = true;
        }
        return strict;
    };

    // level(v) = 1 + max level among v's dominators; dominators cannot have a
    // smaller rounded sum, so they all precede the first smaller-sum entry.
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t v = order[pos];
        int best = 0;
        for (std::size_t q = 0; q < pos; ++q) {
            const std::size_t u = order[q];
            if (sums[u] < sums[v]) break;
            if (dominates(u, v)) best = std::max(best, level[u]);
        }
        level[v] = best + 1;
    }
    return level;
}

}  // namespace quadsky::datagen
