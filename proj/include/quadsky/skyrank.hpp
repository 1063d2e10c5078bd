#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "quadsky/core.hpp"

namespace quadsky::skyrank {

/// Pareto dominance: u >= v in every dimension and u > v in at least one.
/// Equal vectors never dominate. Throws std::invalid_argument on dimension
/// mismatch.
bool dominates(const SimilarityVector& u, const SimilarityVector& v);

namespace detail {

// Block-nested-loop peeling over a flattened value buffer. Candidates stay
// sorted by descending value sum: a dominator's sum is strictly greater
// than the dominated vector's, so each scan stops at the first
// equal-or-smaller sum.
class PeelState {
public:
    PeelState(std::span<const SimilarityVector> deltas, int threads);

    bool done() const { return remaining_.empty(); }
    std::size_t total() const { return sums_.size(); }

    /// Extracts the current non-dominated set, sorted by original index.
    std::vector<std::size_t> next_level();

private:
    std::size_t dims_ = 0;
    std::vector<double> values_;          // n * dims
    std::vector<double> sums_;            // per original index
    std::vector<std::size_t> remaining_;  // original indices, sum-descending
    int threads_ = 1;

    bool dominates_idx(std::size_t a, std::size_t b) const;
};

}  // namespace detail

/// Iterative skyline peeling: level 1 is the non-dominated set, level k+1
/// the non-dominated set once levels <= k are removed. Exact block-nested-
/// loop semantics; `threads` only parallelizes the per-level dominance
/// scans and never changes the result. Throws on empty input.
SkylinePartition peel(std::span<const SimilarityVector> deltas, int threads = 1);

/// Writes 1-based levels into the pairs' skyline_level fields.
void assign_levels(std::vector<CandidatePair>& pairs, const SkylinePartition& partition);

/// Levels consumable one at a time, front to back; lets cut-off selection
/// stop before the whole partition is explored (or even computed).
class LevelSource {
public:
    virtual ~LevelSource() = default;
    virtual std::optional<std::vector<std::size_t>> next() = 0;
    virtual std::size_t total_pairs() const = 0;
};

/// Streams an already-computed partition.
class PartitionLevelSource : public LevelSource {
public:
    explicit PartitionLevelSource(const SkylinePartition& partition);
    std::optional<std::vector<std::size_t>> next() override;
    std::size_t total_pairs() const override { return total_; }

private:
    const SkylinePartition& partition_;
    std::size_t next_level_ = 0;
    std::size_t total_ = 0;
};

/// Peels levels on demand, skipping the Pareto work for levels that are
/// never requested.
class LazyPeelSource : public LevelSource {
public:
    explicit LazyPeelSource(std::span<const SimilarityVector> deltas, int threads = 1);
    std::optional<std::vector<std::size_t>> next() override;
    std::size_t total_pairs() const override { return state_.total(); }

private:
    detail::PeelState state_;
};

}  // namespace quadsky::skyrank
