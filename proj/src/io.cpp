#include "quadsky/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace quadsky::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<std::string> opt_field(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

std::string opt_str(const std::optional<std::string>& s) { return s ? *s : std::string(); }

}  // namespace

// ---------------------------------------------------------------------------
// CSV primitives

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
            case '\r': break;
            case '\n':
                if (any || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                break;
            default: field.push_back(c); any = true; break;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    if (quoted) fail(path, "unterminated quoted field");
    return rows;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.put(',');
            out << csv_escape(row[i]);
        }
        out.put('\n');
    }
}

std::string format_double(double v) {
    char buf[64];
    // Shortest representation that parses back to the same double.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (parse_double(buf) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("not a number: '" + s + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Entities

namespace {
const std::vector<std::string> kEntityHeader{"source", "id",         "lat",
                                             "lon",    "name",       "address",
                                             "categories", "phone", "website"};
}

EntityCollection read_entities_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) fail(path, "empty entity file");
    if (rows[0] != kEntityHeader) fail(path, "unexpected entity CSV header");
    std::vector<SpatialEntity> entities;
    entities.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != kEntityHeader.size()) {
            fail(path, "row " + std::to_string(r + 1) + ": wrong field count");
        }
        SpatialEntity e;
        e.key.source = row[0];
        e.key.id = row[1];
        try {
            e.point.lat = parse_double(row[2]);
            e.point.lon = parse_double(row[3]);
        } catch (const std::exception& ex) {
            fail(path, "row " + std::to_string(r + 1) + ": " + ex.what());
        }
        e.name = row[4];
        e.address = opt_field(row[5]);
        if (!row[6].empty()) {
            e.categories = split(row[6], '|');
            std::sort(e.categories.begin(), e.categories.end());
            e.categories.erase(std::unique(e.categories.begin(), e.categories.end()),
                               e.categories.end());
        }
        e.phone = opt_field(row[7]);
        e.website = opt_field(row[8]);
        entities.push_back(std::move(e));
    }
    return EntityCollection::from_entities(std::move(entities));
}

void write_entities_csv(const std::filesystem::path& path, const EntityCollection& collection) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(collection.size() + 1);
    rows.push_back(kEntityHeader);
    for (const auto& e : collection.entities()) {
        std::string cats;
        for (std::size_t i = 0; i < e.categories.size(); ++i) {
            if (i) cats.push_back('|');
            cats += e.categories[i];
        }
        rows.push_back({e.key.source, e.key.id, format_double(e.point.lat),
                        format_double(e.point.lon), e.name, opt_str(e.address), cats,
                        opt_str(e.phone), opt_str(e.website)});
    }
    write_csv(path, rows);
}

EntityCollection read_entities_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& ex) {
        fail(path, std::string("invalid JSON: ") + ex.what());
    }
    if (!doc.is_array()) fail(path, "expected a JSON array of entities");
    std::vector<SpatialEntity> entities;
    entities.reserve(doc.size());
    for (const auto& item : doc) {
        SpatialEntity e;
        e.key.source = item.at("source").get<std::string>();
        e.key.id = item.at("id").get<std::string>();
        e.point.lat = item.at("lat").get<double>();
        e.point.lon = item.at("lon").get<double>();
        e.name = item.at("name").get<std::string>();
        if (item.contains("address") && !item["address"].is_null()) {
            e.address = item["address"].get<std::string>();
        }
        if (item.contains("categories") && !item["categories"].is_null()) {
            e.categories = item["categories"].get<std::vector<std::string>>();
            std::sort(e.categories.begin(), e.categories.end());
            e.categories.erase(std::unique(e.categories.begin(), e.categories.end()),
                               e.categories.end());
        }
        if (item.contains("phone") && !item["phone"].is_null()) {
            e.phone = item["phone"].get<std::string>();
        }
        if (item.contains("website") && !item["website"].is_null()) {
            e.website = item["website"].get<std::string>();
        }
        entities.push_back(std::move(e));
    }
    return EntityCollection::from_entities(std::move(entities));
}

EntityCollection read_entities(const std::filesystem::path& path) {
    if (path.extension() == ".json") return read_entities_json(path);
    return read_entities_csv(path);
}

// ---------------------------------------------------------------------------
// Pairs

std::vector<SimilarityVector> PairTable::deltas() const {
    std::vector<SimilarityVector> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.delta);
    return out;
}

std::vector<std::uint8_t> PairTable::truth_labels() const {
    std::vector<std::uint8_t> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!p.truth) {
            throw std::runtime_error("pair " + p.left.source + ":" + p.left.id + " / " +
                                     p.right.source + ":" + p.right.id + " has no truth label");
        }
        out.push_back(*p.truth ? 1 : 0);
    }
    return out;
}

PairTable read_pairs_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) fail(path, "empty pair file");
    const auto& header = rows[0];
    const std::vector<std::string> fixed_head{"left_source", "left_id", "right_source",
                                              "right_id"};
    const std::vector<std::string> fixed_tail{"skyline", "truth", "predicted"};
    if (header.size() < fixed_head.size() + fixed_tail.size() + 1) {
        fail(path, "pair CSV header too short");
    }
    for (std::size_t i = 0; i < fixed_head.size(); ++i) {
        if (header[i] != fixed_head[i]) fail(path, "unexpected pair CSV header");
    }
    for (std::size_t i = 0; i < fixed_tail.size(); ++i) {
        if (header[header.size() - fixed_tail.size() + i] != fixed_tail[i]) {
            fail(path, "unexpected pair CSV header");
        }
    }
    PairTable table;
    table.schema.dims.clear();
    for (std::size_t i = fixed_head.size(); i < header.size() - fixed_tail.size(); ++i) {
        const std::string& col = header[i];
        if (col.rfind("delta_", 0) != 0) fail(path, "expected delta_<dim> column, got " + col);
        table.schema.dims.push_back(col.substr(6));
    }

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            fail(path, "row " + std::to_string(r + 1) + ": wrong field count");
        }
        CandidatePair p;
        p.left = {row[0], row[1]};
        p.right = {row[2], row[3]};
        const std::size_t dim_count = table.schema.dims.size();
        bool any_delta = false;
        for (std::size_t d = 0; d < dim_count; ++d) {
            const std::string& cell = row[4 + d];
            if (cell.empty()) continue;
            any_delta = true;
        }
        if (any_delta) {
            p.delta.values.reserve(dim_count);
            for (std::size_t d = 0; d < dim_count; ++d) {
                const std::string& cell = row[4 + d];
                if (cell.empty()) {
                    fail(path, "row " + std::to_string(r + 1) + ": partially filled delta");
                }
                p.delta.values.push_back(parse_double(cell));
            }
        }
        const std::string& sky = row[4 + dim_count];
        if (!sky.empty()) p.skyline_level = static_cast<int>(std::stol(sky));
        const std::string& truth = row[5 + dim_count];
        if (!truth.empty()) p.truth = truth == "1" || truth == "true";
        const std::string& pred = row[6 + dim_count];
        if (!pred.empty()) p.predicted = pred == "1" || pred == "true";
        table.pairs.push_back(std::move(p));
    }
    return table;
}

void write_pairs_csv(const std::filesystem::path& path, const PairTable& table) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(table.pairs.size() + 1);
    std::vector<std::string> header{"left_source", "left_id", "right_source", "right_id"};
    for (const auto& d : table.schema.dims) header.push_back("delta_" + d);
    header.insert(header.end(), {"skyline", "truth", "predicted"});
    rows.push_back(std::move(header));

    for (const auto& p : table.pairs) {
        std::vector<std::string> row{p.left.source, p.left.id, p.right.source, p.right.id};
        if (p.delta.size() == 0) {
            for (std::size_t d = 0; d < table.schema.dims.size(); ++d) row.emplace_back();
        } else {
            if (p.delta.size() != table.schema.dims.size()) {
                fail(path, "pair delta does not match the dimension schema");
            }
            for (double v : p.delta.values) row.push_back(format_double(v));
        }
        row.push_back(p.skyline_level ? std::to_string(*p.skyline_level) : std::string());
        row.push_back(p.truth ? (*p.truth ? "1" : "0") : std::string());
        row.push_back(p.predicted ? (*p.predicted ? "1" : "0") : std::string());
        rows.push_back(std::move(row));
    }
    write_csv(path, rows);
}

void write_blocks_csv(const std::filesystem::path& path, const std::vector<quadflex::Block>& blocks,
                      const EntityCollection& collection) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"block_id", "source", "id"});
    for (const auto& b : blocks) {
        for (std::uint32_t e : b.entities) {
            rows.push_back({std::to_string(b.leaf_id), collection.at(e).key.source,
                            collection.at(e).key.id});
        }
    }
    write_csv(path, rows);
}

std::vector<LabeledPair> read_labels_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) fail(path, "empty labels file");
    const std::vector<std::string> header{"left_source", "left_id", "right_source", "right_id",
                                          "label"};
    if (rows[0] != header) fail(path, "unexpected labels CSV header");
    std::vector<LabeledPair> out;
    out.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            fail(path, "row " + std::to_string(r + 1) + ": wrong field count");
        }
        LabeledPair lp;
        lp.left = {row[0], row[1]};
        lp.right = {row[2], row[3]};
        lp.label = row[4] == "1" || row[4] == "true";
        out.push_back(std::move(lp));
    }
    return out;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<LabeledPair>& labels) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"left_source", "left_id", "right_source", "right_id", "label"});
    for (const auto& lp : labels) {
        rows.push_back({lp.left.source, lp.left.id, lp.right.source, lp.right.id,
                        lp.label ? "1" : "0"});
    }
    write_csv(path, rows);
}

// ---------------------------------------------------------------------------
// Taxonomy

similarity::Taxonomy read_taxonomy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            fail(path, "line " + std::to_string(lineno) + ": expected child<TAB>parent");
        }
        edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    try {
        return similarity::Taxonomy::from_edges(edges);
    } catch (const std::exception& ex) {
        fail(path, ex.what());
    }
}

void write_taxonomy(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "# child<TAB>parent; exactly one term has the parent ROOT\n";
    for (const auto& [child, parent] : edges) out << child << '\t' << parent << '\n';
}

// ---------------------------------------------------------------------------
// Config

std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return std::string();
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(path, "line " + std::to_string(lineno) + ": expected key = value");
        }
        out[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manifest

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    json doc;
    doc["tool_version"] = manifest.tool_version;
    doc["command"] = manifest.command;
    doc["parameters"] = manifest.parameters;
    if (manifest.projection) {
        doc["projection"] = {{"lat0", manifest.projection->lat0},
                             {"lon0", manifest.projection->lon0},
                             {"radius_m", geo::kEarthRadiusM}};
    }
    doc["inputs"] = manifest.inputs;
    doc["outputs"] = manifest.outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << doc.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& ex) {
        fail(path, std::string("invalid JSON: ") + ex.what());
    }
    Manifest m;
    m.tool_version = doc.value("tool_version", "");
    m.command = doc.value("command", "");
    if (doc.contains("parameters")) {
        m.parameters = doc["parameters"].get<std::map<std::string, std::string>>();
    }
    if (doc.contains("projection")) {
        geo::Projection p;
        p.lat0 = doc["projection"].at("lat0").get<double>();
        p.lon0 = doc["projection"].at("lon0").get<double>();
        m.projection = p;
    }
    if (doc.contains("inputs")) m.inputs = doc["inputs"].get<std::vector<std::string>>();
    if (doc.contains("outputs")) m.outputs = doc["outputs"].get<std::vector<std::string>>();
    return m;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

}  // namespace quadsky::io
