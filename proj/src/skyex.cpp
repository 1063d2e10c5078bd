#include "quadsky/skyex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadsky/parallel.hpp"

namespace quadsky::skyex {

namespace {

std::size_t count_positives(std::span<const std::uint8_t> truth) {
    std::size_t p = 0;
    for (bool b : truth) p += b ? 1 : 0;
    return p;
}

void require_two_classes(std::span<const std::uint8_t> truth) {
    const std::size_t p = count_positives(truth);
    if (p == 0 || p == truth.size()) {
        throw std::invalid_argument("degenerate labels: every pair has the same class");
    }
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& sorted_members,
                                       std::size_t n) {
    std::vector<std::size_t> out;
    out.reserve(n - sorted_members.size());
    std::size_t next = 0;
    for (std::size_t m : sorted_members) {
        for (; next < m; ++next) out.push_back(next);
        next = m + 1;
    }
    for (; next < n; ++next) out.push_back(next);
    return out;
}

struct FScan {
    std::vector<LevelMetrics> series;
    std::vector<std::vector<std::size_t>> consumed;
    std::size_t cum_size = 0;
    std::size_t cum_tp = 0;
    std::size_t total_positives = 0;

    LevelMetrics push(const std::vector<std::size_t>& level, std::span<const std::uint8_t> truth) {
        cum_size += level.size();
        for (std::size_t idx : level) cum_tp += truth[idx] ? 1 : 0;
        LevelMetrics m;
        m.k = static_cast<int>(series.size() + 1);
        m.level_size = level.size();
        m.tp = cum_tp;
        m.fp = cum_size - cum_tp;
        m.fn = total_positives - cum_tp;
        const Metrics pm = compute_metrics(m.tp, m.fp, m.fn);
        m.precision = pm.precision;
        m.recall = pm.recall;
        m.f1 = pm.f1;
        series.push_back(m);
        consumed.push_back(level);
        return m;
    }

    std::vector<std::size_t> positives_up_to(int k) const {
        std::vector<std::size_t> out;
        for (int i = 0; i < k; ++i) {
            out.insert(out.end(), consumed[i].begin(), consumed[i].end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

}  // namespace

Metrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    Metrics m;
    m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

ClassificationResult skyex_f(const SkylinePartition& partition, std::span<const std::uint8_t> truth) {
    if (partition.total_pairs() != truth.size()) {
        throw std::invalid_argument("truth labels do not cover the partition");
    }
    require_two_classes(truth);

    FScan scan;
    scan.total_positives = count_positives(truth);
    for (const auto& level : partition.levels) scan.push(level, truth);

    int best_k = 1;
    for (const auto& m : scan.series) {
        if (m.f1 > scan.series[best_k - 1].f1) best_k = m.k;
    }

    ClassificationResult r;
    r.method = CutoffMethod::F;
    r.cutoff_k = best_k;
    r.metric_series = scan.series;
    r.explored_levels = static_cast<int>(partition.levels.size());
    r.positives = scan.positives_up_to(best_k);
    r.negatives = complement_of(r.positives, truth.size());
    return r;
}

ClassificationResult skyex_fes(skyrank::LevelSource& levels, std::span<const std::uint8_t> truth) {
    if (levels.total_pairs() != truth.size()) {
        throw std::invalid_argument("truth labels do not cover the partition");
    }
    require_two_classes(truth);

    FScan scan;
    scan.total_positives = count_positives(truth);
    double previous = -1.0;
    int cutoff = 1;
    int explored = 0;
    while (auto level = levels.next()) {
        const LevelMetrics m = scan.push(*level, truth);
        ++explored;
        if (previous >= 0.0 && m.f1 < previous) break;  // first drop; keep the previous k
        previous = m.f1;
        cutoff = m.k;
    }

    ClassificationResult r;
    r.method = CutoffMethod::FES;
    r.cutoff_k = cutoff;
    r.metric_series = scan.series;
    r.explored_levels = explored;
    r.positives = scan.positives_up_to(cutoff);
    r.negatives = complement_of(r.positives, truth.size());
    return r;
}

ClassificationResult skyex_fes(const SkylinePartition& partition, std::span<const std::uint8_t> truth) {
    skyrank::PartitionLevelSource source(partition);
    return skyex_fes(source, truth);
}

namespace {

double distance(const double* a, const double* b, std::size_t dims, DeltaMetric metric) {
    double acc = 0.0;
    if (metric == DeltaMetric::Euclidean) {
        for (std::size_t k = 0; k < dims; ++k) {
            const double d = a[k] - b[k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    for (std::size_t k = 0; k < dims; ++k) acc += std::abs(a[k] - b[k]);
    return acc;
}

std::vector<double> gaussian_smooth(const std::vector<double>& series, int window, double sigma) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be a positive odd number");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("smoothing sigma must be positive");
    const int h = window / 2;
    std::vector<double> weights(window);
    for (int j = -h; j <= h; ++j) {
        weights[j + h] = std::exp(-(static_cast<double>(j) * j) / (2.0 * sigma * sigma));
    }
    std::vector<double> out(series.size());
    const int n = static_cast<int>(series.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0, wsum = 0.0;
        // Kernel truncated and renormalized at the series ends.
        for (int j = -h; j <= h; ++j) {
            const int p = i + j;
            if (p < 0 || p >= n) continue;
            acc += weights[j + h] * series[p];
            wsum += weights[j + h];
        }
        out[i] = acc / wsum;
    }
    return out;
}

}  // namespace

DistanceProfile mu_profile(const SkylinePartition& partition,
                           std::span<const SimilarityVector> deltas, const MuOptions& options) {
    const std::size_t K = partition.level_count();
    if (K < 3) throw std::invalid_argument("too few levels: the distance profile needs K >= 3");
    const std::size_t n = partition.total_pairs();
    if (n != deltas.size()) {
        throw std::invalid_argument("delta vectors do not cover the partition");
    }
    const std::size_t dims = deltas[0].size();
    std::vector<double> values(n * dims);
    for (std::size_t i = 0; i < n; ++i) {
        if (deltas[i].size() != dims) {
            throw std::invalid_argument("similarity vector dimension mismatch");
        }
        for (std::size_t k = 0; k < dims; ++k) values[i * dims + k] = deltas[i][k];
    }
    const auto dist = [&](std::size_t a, std::size_t b) {
        return distance(values.data() + a * dims, values.data() + b * dims, dims, options.metric);
    };

    // Row sums over the full pair set let the cross-class sum update
    // incrementally: sum(A x B) = sum_{i in A} row[i] - 2 * within(A).
    std::vector<double> row(n, 0.0);
    parallel::for_range(n, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) acc += dist(i, j);
            }
            row[i] = acc;
        }
    });

    DistanceProfile profile;
    profile.window = options.window;
    profile.sigma = options.sigma;
    profile.mu.reserve(K - 1);

    std::vector<std::size_t> members;  // levels 1..k
    double sum_rows = 0.0;
    double within = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const auto& level = partition.levels[k];
        for (std::size_t i : level) {
            sum_rows += row[i];
            for (std::size_t j : members) within += dist(i, j);
        }
        for (std::size_t a = 0; a + 1 < level.size(); ++a) {
            for (std::size_t b = a + 1; b < level.size(); ++b) {
                within += dist(level[a], level[b]);
            }
        }
        members.insert(members.end(), level.begin(), level.end());

        const double cross = sum_rows - 2.0 * within;
        const double positives = static_cast<double>(members.size());
        const double negatives = static_cast<double>(n - members.size());
        profile.mu.push_back(options.eq3_literal ? cross / positives
                                                 : cross / (positives * negatives));
    }

    profile.derivative.reserve(profile.mu.size() - 1);
    for (std::size_t k = 0; k + 1 < profile.mu.size(); ++k) {
        profile.derivative.push_back(profile.mu[k + 1] - profile.mu[k]);
    }
    profile.smoothed = gaussian_smooth(profile.derivative, options.window, options.sigma);
    return profile;
}

SkyexDResult skyex_d(const SkylinePartition& partition, std::span<const SimilarityVector> deltas,
                     const MuOptions& options) {
    SkyexDResult out;
    out.profile = mu_profile(partition, deltas, options);

    const std::size_t K = partition.level_count();
    int cutoff = -1;
    for (std::size_t i = 0; i < out.profile.smoothed.size(); ++i) {
        if (out.profile.smoothed[i] < 0.0) {
            cutoff = static_cast<int>(i + 1);
            break;
        }
    }
    if (cutoff < 0) {
        cutoff = static_cast<int>(K - 1);
        out.fallback = true;
    }

    ClassificationResult& r = out.classification;
    r.method = CutoffMethod::D;
    r.cutoff_k = cutoff;
    r.explored_levels = static_cast<int>(K);
    for (int k = 0; k < cutoff; ++k) {
        r.positives.insert(r.positives.end(), partition.levels[k].begin(),
                           partition.levels[k].end());
    }
    std::sort(r.positives.begin(), r.positives.end());
    r.negatives = complement_of(r.positives, deltas.size());
    return out;
}

}  // namespace quadsky::skyex
