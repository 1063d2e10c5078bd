#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/eval.hpp"
#include "quadsky/geo.hpp"
#include "quadsky/io.hpp"
#include "quadsky/quadflex.hpp"
#include "quadsky/skyex.hpp"
#include "quadsky/similarity.hpp"

namespace quadsky::pipeline {

struct Config {
    std::filesystem::path entities;            // input entity CSV/JSON
    std::filesystem::path taxonomy;            // edge-list taxonomy
    std::filesystem::path out_dir;
    double meters = 100.0;
    double density = std::numeric_limits<double>::infinity();
    std::string dims = "name,address,semantic";
    std::string method = "f";                  // f | fes | d
    int window = 5;
    double sigma = 1.0;
    std::string delta_metric = "euclidean";    // euclidean | manhattan
    bool eq3_literal = false;
    std::string truth = "auto";                // auto | none
    std::optional<std::filesystem::path> truth_file;  // label overrides
    std::string country_code = "45";
    int threads = 0;                           // 0: machine parallelism
    bool write_blocks = true;

    int effective_threads() const;
    skyex::MuOptions mu_options() const;
};

/// Reads a key-value config file into a Config; unknown keys are an error.
Config config_from_file(const std::filesystem::path& path);

// --- stage helpers shared by the CLI subcommands ---------------------------

struct BlockOutput {
    geo::Projection projection;
    std::vector<quadflex::Block> blocks;
    io::PairTable pairs;  // skeletons in the configured dimension schema
};

/// block: project, build the tree, emit deduplicated candidate pairs.
BlockOutput run_block(const EntityCollection& collection, const Config& config);

/// compare: fill each pair's delta vector (and truth when configured).
void run_compare(io::PairTable& table, const EntityCollection& collection,
                 const similarity::Taxonomy& taxonomy, const Config& config);

/// rank: peel the deltas and fill the skyline column.
SkylinePartition run_rank(io::PairTable& table, const Config& config);

/// Rebuilds a partition from the pairs' skyline columns (levels must be a
/// dense 1..K range).
SkylinePartition partition_from_table(const io::PairTable& table);

struct LabelOutput {
    ClassificationResult result;
    std::optional<skyex::DistanceProfile> profile;  // method d only
    bool fallback = false;
};

/// label: choose the cut-off level and fill the predicted column.
LabelOutput run_label(io::PairTable& table, const Config& config);

/// eval: score predictions against truth; unresolved truth pairs (never
/// enumerated by blocking) count as false negatives.
eval::Report run_eval(const io::PairTable& table,
                      const std::vector<io::LabeledPair>& full_truth);

/// Serializes the per-level metric series (and the distance profile, when
/// present) for plotting.
void write_report_csv(const std::filesystem::path& path, const LabelOutput& label);

// --- full pipeline ----------------------------------------------------------

struct RunResult {
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> artifacts;
    std::optional<eval::Report> report;
    ClassificationResult classification;
};

/// Runs ingest -> block -> compare -> rank -> label -> eval, staging every
/// intermediate artifact through its persisted form, and writes a manifest
/// sufficient to reproduce the run. Errors carry the failing stage's name.
RunResult run(const Config& config);

/// Re-runs a pipeline from its manifest.
RunResult run_from_manifest(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& out_dir);

}  // namespace quadsky::pipeline
