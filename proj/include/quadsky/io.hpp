#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quadsky/core.hpp"
#include "quadsky/datagen.hpp"
#include "quadsky/geo.hpp"
#include "quadsky/quadflex.hpp"
#include "quadsky/similarity.hpp"

namespace quadsky::io {

// ---------------------------------------------------------------------------
// CSV primitives (RFC-4180 quoting, UTF-8)

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path,
               const std::vector<std::vector<std::string>>& rows);
std::string format_double(double v);  // shortest round-trip formatting
double parse_double(const std::string& s);

// ---------------------------------------------------------------------------
// Entities: CSV `source,id,lat,lon,name,address,categories,phone,website`
// (categories |-separated, empty field = absent) and an equivalent JSON array.

EntityCollection read_entities_csv(const std::filesystem::path& path);
void write_entities_csv(const std::filesystem::path& path, const EntityCollection& collection);
EntityCollection read_entities_json(const std::filesystem::path& path);
EntityCollection read_entities(const std::filesystem::path& path);  // by extension

// ---------------------------------------------------------------------------
// Pairs: CSV `left_source,left_id,right_source,right_id,delta_<dim>...,
// skyline,truth,predicted`; empty cells mean unset.

struct PairTable {
    similarity::DimensionSchema schema;
    std::vector<CandidatePair> pairs;

    std::vector<SimilarityVector> deltas() const;
    /// Truth labels for every pair; throws if any pair lacks one.
    std::vector<std::uint8_t> truth_labels() const;
};

PairTable read_pairs_csv(const std::filesystem::path& path);
void write_pairs_csv(const std::filesystem::path& path, const PairTable& table);

// Blocks dump: `block_id,source,id`.
void write_blocks_csv(const std::filesystem::path& path, const std::vector<quadflex::Block>& blocks,
                      const EntityCollection& collection);

// Labels: `left_source,left_id,right_source,right_id,label`.
struct LabeledPair {
    EntityId left, right;
    bool label = false;
};
std::vector<LabeledPair> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<LabeledPair>& labels);

// ---------------------------------------------------------------------------
// Taxonomy: UTF-8 text, one `child<TAB>parent` edge per line, `#` comments;
// exactly one term has the parent ROOT.

similarity::Taxonomy read_taxonomy(const std::filesystem::path& path);
void write_taxonomy(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& edges);

// ---------------------------------------------------------------------------
// Key-value config: `key = value` lines, `#` comments.

std::map<std::string, std::string> read_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifest (JSON): every parameter needed to reproduce a run.

struct Manifest {
    std::string tool_version;
    std::string command;
    std::map<std::string, std::string> parameters;
    std::optional<geo::Projection> projection;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

/// FNV-1a over a file's bytes; recorded for traceability.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace quadsky::io
