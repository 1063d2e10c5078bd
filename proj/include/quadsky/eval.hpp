#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/skyex.hpp"

namespace quadsky::eval {

/// Digits only, with explicit international prefixes ("+cc" or "00cc")
/// stripped to the national form. Returns nullopt when no digits remain.
std::optional<std::string> normalize_phone(std::string_view raw,
                                           std::string_view country_code = "45");

/// Lowercased host+path: scheme and a leading "www." stripped, query and
/// fragment dropped, trailing slash removed. Returns nullopt when empty.
std::optional<std::string> normalize_website(std::string_view raw);

/// True iff the two entities have present-and-equal normalized phones or
/// present-and-equal normalized websites. Symmetric and deterministic.
bool auto_label(const SpatialEntity& a, const SpatialEntity& b,
                std::string_view country_code = "45");

/// Manual overrides keyed by canonical pair identity; merged over automatic
/// labels.
class TruthOverrides {
public:
    void set(const EntityId& left, const EntityId& right, bool label);
    std::optional<bool> lookup(const EntityId& left, const EntityId& right) const;
    std::size_t size() const { return labels_.size(); }

private:
    std::map<std::pair<EntityId, EntityId>, bool> labels_;
};

/// End-of-pipeline evaluation report.
struct Report {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t unresolved_fn = 0;  // truth pairs never enumerated as candidates
    skyex::Metrics metrics;
    std::vector<LevelMetrics> series;  // per-level curves when available

    std::string summary_line() const;
};

/// Scores predictions against truth labels over the same pair list.
/// `unresolved_truth` counts matches the blocking never produced; they are
/// added to the false negatives. Metric math is shared with the cut-off
/// selection (skyex::compute_metrics).
Report evaluate(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth,
                std::size_t unresolved_truth = 0);

/// Same, taking the series recorded by a cut-off run for the report.
Report evaluate(const ClassificationResult& result, std::span<const std::uint8_t> truth,
                std::size_t unresolved_truth = 0);

}  // namespace quadsky::eval
