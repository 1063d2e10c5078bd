#include "quadsky/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace quadsky {

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

EntityCollection EntityCollection::from_entities(std::vector<SpatialEntity> entities) {
    EntityCollection c;
    c.entities_ = std::move(entities);

    std::unordered_set<std::string> seen;
    seen.reserve(c.entities_.size());
    bool first = true;
    for (std::size_t i = 0; i < c.entities_.size(); ++i) {
        const auto& e = c.entities_[i];
        const std::string where = e.key.source + ":" + e.key.id;
        if (e.point.lat < -90.0 || e.point.lat > 90.0 || e.point.lon < -180.0 ||
            e.point.lon > 180.0 || !std::isfinite(e.point.lat) || !std::isfinite(e.point.lon)) {
            throw std::invalid_argument("entity " + where + " (row " + std::to_string(i) +
                                        "): coordinates out of range");
        }
        if (e.name.empty() || is_blank(e.name)) {
            throw std::invalid_argument("entity " + where + " (row " + std::to_string(i) +
                                        "): empty name");
        }
        if (!seen.insert(e.key.source + "\x1f" + e.key.id).second) {
            throw std::invalid_argument("duplicate entity key " + where + " (row " +
                                        std::to_string(i) + ")");
        }
        if (first) {
            c.bounds_ = {e.point.lat, e.point.lat, e.point.lon, e.point.lon};
            first = false;
        } else {
            c.bounds_.min_lat = std::min(c.bounds_.min_lat, e.point.lat);
            c.bounds_.max_lat = std::max(c.bounds_.max_lat, e.point.lat);
            c.bounds_.min_lon = std::min(c.bounds_.min_lon, e.point.lon);
            c.bounds_.max_lon = std::max(c.bounds_.max_lon, e.point.lon);
        }
    }
    if (!c.entities_.empty()) {
        if (c.bounds_.max_lon - c.bounds_.min_lon > 180.0) {
            throw std::invalid_argument("dataset spans more than 180 degrees of longitude");
        }
        if (c.bounds_.min_lat < -89.0 || c.bounds_.max_lat > 89.0) {
            throw std::invalid_argument("dataset reaches polar latitudes");
        }
    }

    c.order_.resize(c.entities_.size());
    std::iota(c.order_.begin(), c.order_.end(), 0u);
    std::sort(c.order_.begin(), c.order_.end(), [&](std::uint32_t a, std::uint32_t b) {
        return c.entities_[a].key < c.entities_[b].key;
    });
    c.ranks_.resize(c.entities_.size());
    for (std::uint32_t r = 0; r < c.order_.size(); ++r) c.ranks_[c.order_[r]] = r;
    return c;
}

std::optional<std::size_t> EntityCollection::find(const EntityId& key) const {
    auto it = std::lower_bound(order_.begin(), order_.end(), key,
                               [&](std::uint32_t i, const EntityId& k) { return entities_[i].key < k; });
    if (it == order_.end() || !(entities_[*it].key == key)) return std::nullopt;
    return *it;
}

CandidatePair canonicalize_pair(const EntityId& a, const EntityId& b) {
    if (a == b) throw std::invalid_argument("self-pair: " + a.source + ":" + a.id);
    CandidatePair p;
    if (a < b) {
        p.left = a;
        p.right = b;
    } else {
        p.left = b;
        p.right = a;
    }
    return p;
}

std::size_t SkylinePartition::total_pairs() const {
    std::size_t n = 0;
    for (const auto& lvl : levels) n += lvl.size();
    return n;
}

const char* to_string(CutoffMethod m) {
    switch (m) {
        case CutoffMethod::F: return "f";
        case CutoffMethod::FES: return "fes";
        case CutoffMethod::D: return "d";
    }
    return "?";
}

}  // namespace quadsky
