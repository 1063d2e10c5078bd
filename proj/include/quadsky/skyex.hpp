#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/skyrank.hpp"

namespace quadsky::skyex {

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision, recall and F-measure from confusion counts; a zero denominator
/// yields 0 for the affected metric.
Metrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t fn);

/// Cut-off at the level whose cumulative F-measure is maximal (smallest k on
/// ties). Explores every level and retains the full metric series.
/// Throws std::invalid_argument when the labels are all one class.
ClassificationResult skyex_f(const SkylinePartition& partition, std::span<const std::uint8_t> truth);

/// Early-stopping variant: consumes levels in order and stops at the first
/// strict F-measure drop, returning the previous level as the cut-off.
/// Plateaus (equal F-measure) do not stop it. explored_levels records how
/// many levels were consumed.
ClassificationResult skyex_fes(skyrank::LevelSource& levels, std::span<const std::uint8_t> truth);
ClassificationResult skyex_fes(const SkylinePartition& partition, std::span<const std::uint8_t> truth);

enum class DeltaMetric { Euclidean, Manhattan };

struct MuOptions {
    int window = 5;          // Gaussian smoothing window (odd)
    double sigma = 1.0;      // Gaussian sigma
    DeltaMetric metric = DeltaMetric::Euclidean;
    bool eq3_literal = false;  // normalize by |P+| instead of |P+|*|P-|
    int threads = 1;
};

/// Inter-class mean-distance series and its smoothed derivative.
struct DistanceProfile {
    std::vector<double> mu;          // mu_d(k), k = 1..K-1
    std::vector<double> derivative;  // mu_d(k+1) - mu_d(k), k = 1..K-2
    std::vector<double> smoothed;    // Gaussian-smoothed derivative, same length
    int window = 5;
    double sigma = 1.0;
};

/// Mean delta-space distance between the pairs in levels 1..k and the rest,
/// for every feasible k, with the forward-difference derivative and its
/// Gaussian smoothing (kernel truncated and renormalized at the ends).
/// Throws std::invalid_argument when the partition has fewer than 3 levels.
DistanceProfile mu_profile(const SkylinePartition& partition,
                           std::span<const SimilarityVector> deltas, const MuOptions& options);

struct SkyexDResult {
    ClassificationResult classification;
    DistanceProfile profile;
    bool fallback = false;  // derivative never went negative; cut at K-1
};

/// Label-free cut-off: the smallest k whose smoothed derivative is negative,
/// or K-1 when it never is. Consults no truth labels.
SkyexDResult skyex_d(const SkylinePartition& partition,
                     std::span<const SimilarityVector> deltas, const MuOptions& options = {});

}  // namespace quadsky::skyex
