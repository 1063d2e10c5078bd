#include "quadsky/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <stdexcept>

namespace quadsky::similarity {

namespace {

bool ascii_space(unsigned char c) { return std::isspace(c) != 0; }
char ascii_lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

}  // namespace

// ---------------------------------------------------------------------------
// Taxonomy

Taxonomy Taxonomy::from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
    Taxonomy t;
    auto intern = [&t](const std::string& name) -> std::size_t {
        auto it = t.index_.find(name);
        if (it != t.index_.end()) return it->second;
        const std::size_t id = t.terms_.size();
        t.terms_.push_back(name);
        t.index_.emplace(name, id);
        t.parents_.emplace_back();
        t.children_.emplace_back();
        return id;
    };

    std::optional<std::size_t> root;
    for (const auto& [child, parent] : edges) {
        if (child.empty()) throw std::invalid_argument("taxonomy edge with empty child");
        const std::size_t c = intern(child);
        if (parent == "ROOT") {
            if (root && *root != c) {
                throw std::invalid_argument("taxonomy has more than one root term");
            }
            root = c;
            continue;
        }
        const std::size_t p = intern(parent);
        if (p == c) throw std::invalid_argument("taxonomy self-edge at " + child);
        t.parents_[c].push_back(p);
        t.children_[p].push_back(c);
    }
    if (!root) throw std::invalid_argument("taxonomy has no ROOT term");
    t.root_ = *root;
    if (!t.parents_[t.root_].empty()) {
        throw std::invalid_argument("root term must not have parents");
    }

    // Longest-path depths via topological order from the root.
    const std::size_t n = t.terms_.size();
    t.depth_.assign(n, 0);
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t i = 0; i < n; ++i) pending[i] = t.parents_[i].size();
    std::queue<std::size_t> ready;
    ready.push(t.root_);
    t.depth_[t.root_] = 1;
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.front();
        ready.pop();
        ++visited;
        for (std::size_t v : t.children_[u]) {
            t.depth_[v] = std::max(t.depth_[v], t.depth_[u] + 1);
            if (--pending[v] == 0) ready.push(v);
        }
    }
    if (visited != n) {
        throw std::invalid_argument("taxonomy has a cycle or terms unreachable from the root");
    }

    // Reflexive ancestor sets, sorted for fast intersection.
    t.ancestors_.assign(n, {});
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return t.depth_[a] < t.depth_[b]; });
    for (std::size_t u : order) {
        std::vector<std::size_t> anc{u};
        for (std::size_t p : t.parents_[u]) {
            anc.insert(anc.end(), t.ancestors_[p].begin(), t.ancestors_[p].end());
        }
        std::sort(anc.begin(), anc.end());
        anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
        t.ancestors_[u] = std::move(anc);
    }
    return t;
}

std::size_t Taxonomy::must_find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) throw std::invalid_argument("unknown taxonomy term: " + term);
    return it->second;
}

int Taxonomy::depth(const std::string& term) const { return depth_[must_find(term)]; }

std::vector<std::string> Taxonomy::leaf_terms() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (children_[i].empty()) out.push_back(terms_[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Taxonomy::siblings(const std::string& term) const {
    const std::size_t u = must_find(term);
    std::vector<std::string> out;
    for (std::size_t p : parents_[u]) {
        for (std::size_t v : children_[p]) {
            if (v != u) out.push_back(terms_[v]);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t Taxonomy::lca_index(std::size_t a, std::size_t b) const {
    const auto& aa = ancestors_[a];
    const auto& ab = ancestors_[b];
    std::size_t best = root_;
    int best_depth = 0;
    auto i = aa.begin();
    auto j = ab.begin();
    while (i != aa.end() && j != ab.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            const std::size_t u = *i;
            if (depth_[u] > best_depth ||
                (depth_[u] == best_depth && terms_[u] < terms_[best])) {
                best = u;
                best_depth = depth_[u];
            }
            ++i;
            ++j;
        }
    }
    return best;
}

const std::string& Taxonomy::lowest_common_ancestor(const std::string& a,
                                                    const std::string& b) const {
    return terms_[lca_index(must_find(a), must_find(b))];
}

double wup(const Taxonomy& t, const std::string& c1, const std::string& c2) {
    const std::size_t a = t.must_find(c1);
    const std::size_t b = t.must_find(c2);
    const std::size_t l = t.lca_index(a, b);
    return 2.0 * t.depth_[l] / static_cast<double>(t.depth_[a] + t.depth_[b]);
}

double sem_sim(const Taxonomy& t, const std::vector<std::string>& c1,
               const std::vector<std::string>& c2) {
    if (c1.empty() || c2.empty()) return 0.0;
    double best = 0.0;
    for (const auto& a : c1) {
        for (const auto& b : c2) best = std::max(best, wup(t, a, b));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Text metrics

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t m = a.size(), n = b.size();
    if (m == 0) return n;
    std::vector<std::size_t> row(m + 1);
    for (std::size_t i = 0; i <= m; ++i) row[i] = i;
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t diag = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= m; ++i) {
            const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[i];
            row[i] = std::min({row[i] + 1, row[i - 1] + 1, subst});
        }
    }
    return row[m];
}

std::string fold_text(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && ascii_space(s[b])) ++b;
    while (e > b && ascii_space(s[e - 1])) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) out.push_back(ascii_lower(s[i]));
    return out;
}

double text_sim(std::string_view a, std::string_view b) {
    const std::string fa = fold_text(a);
    const std::string fb = fold_text(b);
    const std::size_t longest = std::max(fa.size(), fb.size());
    if (longest == 0) throw std::invalid_argument("undefined similarity of two empty strings");
    const std::size_t d = levenshtein(fa, fb);
    return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

std::string normalize_address(std::string_view a) {
    std::string out;
    out.reserve(a.size());
    bool pending_space = false;
    for (unsigned char c : a) {
        if (ascii_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x80 && std::ispunct(c)) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ascii_lower(c));
    }
    return out;
}

double address_sim(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return 0.0;
    const std::string na = normalize_address(*a);
    const std::string nb = normalize_address(*b);
    if (na.empty() || nb.empty()) return 0.0;
    if (na == nb) return 1.0;
    if (na.find(nb) != std::string::npos || nb.find(na) != std::string::npos) return 0.9;
    return 0.0;
}

// ---------------------------------------------------------------------------
// Pair comparison

DimensionSchema DimensionSchema::parse(std::string_view comma_separated) {
    DimensionSchema s;
    s.dims.clear();
    std::size_t start = 0;
    while (start <= comma_separated.size()) {
        const std::size_t comma = comma_separated.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? comma_separated.size() : comma;
        std::string dim(comma_separated.substr(start, end - start));
        if (!dim.empty()) s.dims.push_back(std::move(dim));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (s.dims.empty()) throw std::invalid_argument("empty dimension list");
    for (const auto& d : s.dims) {
        if (d != "name" && d != "address" && d != "semantic") {
            throw std::invalid_argument("unknown similarity dimension: " + d);
        }
    }
    return s;
}

SimilarityVector compare_pair(const SpatialEntity& e1, const SpatialEntity& e2,
                              const Taxonomy& taxonomy, const DimensionSchema& schema) {
    SimilarityVector v;
    v.values.reserve(schema.dims.size());
    for (const auto& dim : schema.dims) {
        if (dim == "name") {
            v.values.push_back(text_sim(e1.name, e2.name));
        } else if (dim == "address") {
            v.values.push_back(address_sim(e1.address, e2.address));
        } else if (dim == "semantic") {
            v.values.push_back(sem_sim(taxonomy, e1.categories, e2.categories));
        } else {
            throw std::invalid_argument("unknown similarity dimension: " + dim);
        }
    }
    return v;
}

}  // namespace quadsky::similarity
