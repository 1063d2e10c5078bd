#include "quadsky/skyrank.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "quadsky/parallel.hpp"

namespace quadsky::skyrank {

bool dominates(const SimilarityVector& u, const SimilarityVector& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("similarity vector dimension mismatch");
    }
    bool strict = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < v[i]) return false;
        if (u[i] > v[i]) strict = true;
    }
    return strict;
}

namespace detail {

PeelState::PeelState(std::span<const SimilarityVector> deltas, int threads) : threads_(threads) {
    if (deltas.empty()) throw std::invalid_argument("cannot rank an empty pair set");
    dims_ = deltas[0].size();
    if (dims_ == 0) throw std::invalid_argument("similarity vectors have no dimensions");
    const std::size_t n = deltas.size();
    values_.resize(n * dims_);
    sums_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (deltas[i].size() != dims_) {
            throw std::invalid_argument("similarity vector dimension mismatch");
        }
        double s = 0.0;
        for (std::size_t k = 0; k < dims_; ++k) {
            values_[i * dims_ + k] = deltas[i][k];
            s += deltas[i][k];
        }
        sums_[i] = s;
    }
    remaining_.resize(n);
    std::iota(remaining_.begin(), remaining_.end(), std::size_t{0});
    std::stable_sort(remaining_.begin(), remaining_.end(),
                     [this](std::size_t a, std::size_t b) { return sums_[a] > sums_[b]; });
}

bool PeelState::dominates_idx(std::size_t a, std::size_t b) const {
    const double* u = values_.data() + a * dims_;
    const double* v = values_.data() + b * dims_;
    bool strict = false;
    for (std::size_t k = 0; k < dims_; ++k) {
        if (u[k] < v[k]) return false;
        if (u[k] > v[k]) strict = true;
    }
    return strict;
}

std::vector<std::size_t> PeelState::next_level() {
    const std::size_t n = remaining_.size();
    std::vector<char> in_level(n, 0);
    parallel::for_range(n, threads_, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t v = remaining_[i];
            bool dominated = false;
            // Rounded sums of a dominator are >= the dominated vector's, so
            // the scan covers the whole prefix with sums >= sums_[v]; an
            // equal-sum dominator may sit after position i. Self-comparison
            // is harmless (equal vectors never dominate).
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t u = remaining_[j];
                if (sums_[u] < sums_[v]) break;
                if (dominates_idx(u, v)) {
                    dominated = true;
                    break;
                }
            }
            in_level[i] = dominated ? 0 : 1;
        }
    });
    std::vector<std::size_t> level;
    std::vector<std::size_t> rest;
    rest.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        (in_level[i] ? level : rest).push_back(remaining_[i]);
    }
    remaining_ = std::move(rest);
    std::sort(level.begin(), level.end());
    return level;
}

}  // namespace detail

SkylinePartition peel(std::span<const SimilarityVector> deltas, int threads) {
    detail::PeelState state(deltas, threads);
    SkylinePartition partition;
    while (!state.done()) partition.levels.push_back(state.next_level());
    return partition;
}

void assign_levels(std::vector<CandidatePair>& pairs, const SkylinePartition& partition) {
    for (std::size_t k = 0; k < partition.levels.size(); ++k) {
        for (std::size_t idx : partition.levels[k]) {
            pairs.at(idx).skyline_level = static_cast<int>(k + 1);
        }
    }
}

PartitionLevelSource::PartitionLevelSource(const SkylinePartition& partition)
    : partition_(partition), total_(partition.total_pairs()) {}

std::optional<std::vector<std::size_t>> PartitionLevelSource::next() {
    if (next_level_ >= partition_.levels.size()) return std::nullopt;
    return partition_.levels[next_level_++];
}

LazyPeelSource::LazyPeelSource(std::span<const SimilarityVector> deltas, int threads)
    : state_(deltas, threads) {}

std::optional<std::vector<std::size_t>> LazyPeelSource::next() {
    if (state_.done()) return std::nullopt;
    return state_.next_level();
}

}  // namespace quadsky::skyrank
