#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quadsky/core.hpp"

namespace quadsky::similarity {

/// Rooted is-a hierarchy over term identifiers. Edges point child -> parent
/// and may form a DAG (a term can have several parents). Depth counts nodes
/// on the longest root path, with depth(root) = 1.
class Taxonomy {
public:
    /// Builds from (child, parent) edges; the root is the single term whose
    /// parent is the literal "ROOT". Throws std::invalid_argument on cycles,
    /// missing/multiple roots, or terms unreachable from the root.
    static Taxonomy from_edges(const std::vector<std::pair<std::string, std::string>>& edges);

    bool contains(const std::string& term) const { return index_.count(term) > 0; }
    int depth(const std::string& term) const;
    const std::string& root() const { return terms_[root_]; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    /// Terms with no children; handy for sampling category assignments.
    std::vector<std::string> leaf_terms() const;
    /// Other children of the term's parents (itself excluded).
    std::vector<std::string> siblings(const std::string& term) const;

    /// Deepest common ancestor (terms are their own ancestors). Ties go to
    /// the lexicographically smallest identifier among the deepest.
    const std::string& lowest_common_ancestor(const std::string& a, const std::string& b) const;

    friend double wup(const Taxonomy& t, const std::string& c1, const std::string& c2);

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<int> depth_;                       // longest path from root, root = 1
    std::vector<std::vector<std::size_t>> ancestors_;  // reflexive, sorted by id
    std::size_t root_ = 0;

    std::size_t must_find(const std::string& term) const;
    std::size_t lca_index(std::size_t a, std::size_t b) const;
};

/// Classic edit distance (insert, delete, substitute), byte-oriented.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Trimmed and case-folded before comparison.
std::string fold_text(std::string_view s);

/// 1 - d(a, b) / max(|a|, |b|) on folded inputs.
/// Throws std::invalid_argument when both strings are empty after folding.
double text_sim(std::string_view a, std::string_view b);

/// Lowercase, punctuation stripped, whitespace collapsed and trimmed.
std::string normalize_address(std::string_view a);

/// 1.0 on normalized equality, 0.9 when one normalized string contains the
/// other, 0.0 otherwise. An absent address on either side scores 0.0.
double address_sim(const std::optional<std::string>& a, const std::optional<std::string>& b);

/// Wu-Palmer similarity: 2 * depth(lca) / (depth(c1) + depth(c2)), in (0, 1].
/// Throws std::invalid_argument for unknown terms.
double wup(const Taxonomy& t, const std::string& c1, const std::string& c2);

/// Maximal wup over the cross product of the two term sets; 0.0 when either
/// set is empty.
double sem_sim(const Taxonomy& t, const std::vector<std::string>& c1,
               const std::vector<std::string>& c2);

/// The run's fixed similarity dimension order; recorded in output headers.
struct DimensionSchema {
    std::vector<std::string> dims{"name", "address", "semantic"};

    static DimensionSchema parse(std::string_view comma_separated);
    std::size_t size() const { return dims.size(); }
};

/// Similarity vector of a canonical pair in schema order. Dimensions with a
/// missing attribute on either side score 0.0.
SimilarityVector compare_pair(const SpatialEntity& e1, const SpatialEntity& e2,
                              const Taxonomy& taxonomy, const DimensionSchema& schema);

}  // namespace quadsky::similarity
