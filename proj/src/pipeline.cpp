#include "quadsky/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "quadsky/parallel.hpp"
#include "quadsky/skyrank.hpp"
#include "quadsky/version.hpp"

namespace quadsky::pipeline {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void stage_error(const std::string& stage, const std::exception& ex) {
    throw std::runtime_error("stage " + stage + ": " + ex.what());
}

skyex::DeltaMetric parse_metric(const std::string& name) {
    if (name == "euclidean") return skyex::DeltaMetric::Euclidean;
    if (name == "manhattan") return skyex::DeltaMetric::Manhattan;
    throw std::invalid_argument("unknown delta metric: " + name);
}

}  // namespace

int Config::effective_threads() const {
    return threads > 0 ? threads : parallel::default_threads();
}

skyex::MuOptions Config::mu_options() const {
    skyex::MuOptions o;
    o.window = window;
    o.sigma = sigma;
    o.metric = parse_metric(delta_metric);
    o.eq3_literal = eq3_literal;
    o.threads = effective_threads();
    return o;
}

Config config_from_file(const fs::path& path) {
    Config c;
    for (const auto& [key, value] : io::read_config(path)) {
        if (key == "entities") c.entities = value;
        else if (key == "taxonomy") c.taxonomy = value;
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "meters") c.meters = io::parse_double(value);
        else if (key == "density") {
            c.density = value == "unlimited" ? std::numeric_limits<double>::infinity()
                                             : io::parse_double(value);
        } else if (key == "dims") c.dims = value;
        else if (key == "method") c.method = value;
        else if (key == "window") c.window = std::stoi(value);
        else if (key == "sigma") c.sigma = io::parse_double(value);
        else if (key == "delta_metric") c.delta_metric = value;
        else if (key == "eq3_literal") c.eq3_literal = value == "1" || value == "true";
        else if (key == "truth") c.truth = value;
        else if (key == "truth_file") c.truth_file = fs::path(value);
        else if (key == "country_code") c.country_code = value;
        else if (key == "threads") c.threads = std::stoi(value);
        else if (key == "write_blocks") c.write_blocks = value == "1" || value == "true";
        else throw std::runtime_error(path.string() + ": unknown config key '" + key + "'");
    }
    return c;
}

BlockOutput run_block(const EntityCollection& collection, const Config& config) {
    BlockOutput out;
    out.projection = geo::make_projection(collection);
    const auto points = geo::project(collection, out.projection);
    quadflex::QuadParams params;
    params.max_diagonal_m = config.meters;
    params.max_density = config.density;
    const auto tree = quadflex::QuadFlex::build(points, params);
    out.blocks = tree.leaves();
    out.pairs.schema = similarity::DimensionSchema::parse(config.dims);
    out.pairs.pairs = quadflex::enumerate_pairs(out.blocks, collection);
    return out;
}

void run_compare(io::PairTable& table, const EntityCollection& collection,
                 const similarity::Taxonomy& taxonomy, const Config& config) {
    const bool auto_truth = config.truth == "auto";
    if (!auto_truth && config.truth != "none") {
        throw std::invalid_argument("unknown truth mode: " + config.truth);
    }

    // Resolve entity references once; comparing is the parallel stage.
    std::vector<std::pair<std::size_t, std::size_t>> refs(table.pairs.size());
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        const auto& p = table.pairs[i];
        const auto li = collection.find(p.left);
        const auto ri = collection.find(p.right);
        if (!li || !ri) {
            throw std::runtime_error("pair row " + std::to_string(i + 1) +
                                     " references an unknown entity");
        }
        refs[i] = {*li, *ri};
    }
    parallel::for_range(table.pairs.size(), config.effective_threads(),
                        [&](std::size_t begin, std::size_t end) {
                            for (std::size_t i = begin; i < end; ++i) {
                                auto& p = table.pairs[i];
                                const auto& e1 = collection.at(refs[i].first);
                                const auto& e2 = collection.at(refs[i].second);
                                p.delta = similarity::compare_pair(e1, e2, taxonomy, table.schema);
                                if (auto_truth) {
                                    p.truth = eval::auto_label(e1, e2, config.country_code);
                                }
                            }
                        });

    if (config.truth_file) {
        eval::TruthOverrides overrides;
        for (const auto& lp : io::read_labels_csv(*config.truth_file)) {
            overrides.set(lp.left, lp.right, lp.label);
        }
        for (auto& p : table.pairs) {
            if (const auto o = overrides.lookup(p.left, p.right)) p.truth = *o;
        }
    }
}

SkylinePartition run_rank(io::PairTable& table, const Config& config) {
    const auto deltas = table.deltas();
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i].size() != table.schema.size()) {
            throw std::runtime_error("pair row " + std::to_string(i + 1) +
                                     " has no similarity vector; run compare first");
        }
    }
    const SkylinePartition partition = skyrank::peel(deltas, config.effective_threads());
    skyrank::assign_levels(table.pairs, partition);
    return partition;
}

SkylinePartition partition_from_table(const io::PairTable& table) {
    int max_level = 0;
    for (const auto& p : table.pairs) {
        if (!p.skyline_level) {
            throw std::runtime_error("pair without a skyline level; run rank first");
        }
        max_level = std::max(max_level, *p.skyline_level);
    }
    if (max_level == 0) throw std::runtime_error("empty partition");
    SkylinePartition partition;
    partition.levels.resize(static_cast<std::size_t>(max_level));
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        const int k = *table.pairs[i].skyline_level;
        if (k < 1) throw std::runtime_error("skyline level below 1");
        partition.levels[static_cast<std::size_t>(k - 1)].push_back(i);
    }
    for (std::size_t k = 0; k < partition.levels.size(); ++k) {
        if (partition.levels[k].empty()) {
            throw std::runtime_error("skyline levels are not a dense 1..K range");
        }
    }
    return partition;
}

LabelOutput run_label(io::PairTable& table, const Config& config) {
    const SkylinePartition partition = partition_from_table(table);
    LabelOutput out;
    if (config.method == "f" || config.method == "fes") {
        const auto truth = table.truth_labels();
        out.result = config.method == "f" ? skyex::skyex_f(partition, truth)
                                          : skyex::skyex_fes(partition, truth);
    } else if (config.method == "d") {
        auto d = skyex::skyex_d(partition, table.deltas(), config.mu_options());
        out.result = std::move(d.classification);
        out.profile = std::move(d.profile);
        out.fallback = d.fallback;
    } else {
        throw std::invalid_argument("unknown method: " + config.method);
    }
    for (auto& p : table.pairs) p.predicted = false;
    for (std::size_t idx : out.result.positives) table.pairs[idx].predicted = true;
    return out;
}

eval::Report run_eval(const io::PairTable& table, const std::vector<io::LabeledPair>& full_truth) {
    std::vector<std::uint8_t> predicted;
    std::vector<std::uint8_t> truth;
    predicted.reserve(table.pairs.size());
    truth.reserve(table.pairs.size());
    for (const auto& p : table.pairs) {
        if (!p.predicted) throw std::runtime_error("pair without a prediction; run label first");
        if (!p.truth) throw std::runtime_error("pair without a truth label");
        predicted.push_back(*p.predicted ? 1 : 0);
        truth.push_back(*p.truth ? 1 : 0);
    }

    std::size_t unresolved = 0;
    if (!full_truth.empty()) {
        std::unordered_map<std::string, bool> candidate;
        candidate.reserve(table.pairs.size());
        auto key = [](const EntityId& l, const EntityId& r) {
            return l.source + "\x1f" + l.id + "\x1f" + r.source + "\x1f" + r.id;
        };
        for (const auto& p : table.pairs) candidate.emplace(key(p.left, p.right), true);
        for (const auto& lp : full_truth) {
            if (!lp.label) continue;
            const CandidatePair canon = canonicalize_pair(lp.left, lp.right);
            if (!candidate.count(key(canon.left, canon.right))) ++unresolved;
        }
    }
    return eval::evaluate(predicted, truth, unresolved);
}

void write_report_csv(const fs::path& path, const LabelOutput& label) {
    std::vector<std::vector<std::string>> rows;
    if (!label.result.metric_series.empty()) {
        rows.push_back({"k", "level_size", "tp", "fp", "fn", "precision", "recall", "f1"});
        for (const auto& m : label.result.metric_series) {
            rows.push_back({std::to_string(m.k), std::to_string(m.level_size),
                            std::to_string(m.tp), std::to_string(m.fp), std::to_string(m.fn),
                            io::format_double(m.precision), io::format_double(m.recall),
                            io::format_double(m.f1)});
        }
    } else if (label.profile) {
        rows.push_back({"k", "mu", "derivative", "smoothed"});
        const auto& prof = *label.profile;
        for (std::size_t k = 0; k < prof.mu.size(); ++k) {
            rows.push_back({std::to_string(k + 1), io::format_double(prof.mu[k]),
                            k < prof.derivative.size() ? io::format_double(prof.derivative[k])
                                                       : std::string(),
                            k < prof.smoothed.size() ? io::format_double(prof.smoothed[k])
                                                     : std::string()});
        }
    }
    io::write_csv(path, rows);
}

namespace {

io::Manifest build_manifest(const Config& config, const geo::Projection& projection) {
    io::Manifest m;
    m.tool_version = kVersion;
    m.command = "pipeline";
    m.projection = projection;
    m.parameters["meters"] = io::format_double(config.meters);
    m.parameters["density"] = std::isfinite(config.density) ? io::format_double(config.density)
                                                            : "unlimited";
    m.parameters["dims"] = config.dims;
    m.parameters["method"] = config.method;
    m.parameters["window"] = std::to_string(config.window);
    m.parameters["sigma"] = io::format_double(config.sigma);
    m.parameters["delta_metric"] = config.delta_metric;
    m.parameters["eq3_literal"] = config.eq3_literal ? "1" : "0";
    m.parameters["truth"] = config.truth;
    m.parameters["country_code"] = config.country_code;
    m.parameters["case_fold"] = "ascii";
    m.parameters["missing_attribute_similarity"] = "0";
    m.inputs.push_back(config.entities.string());
    m.inputs.push_back(config.taxonomy.string());
    if (config.truth_file) m.inputs.push_back(config.truth_file->string());
    return m;
}

}  // namespace

RunResult run(const Config& config) {
    RunResult result;
    fs::create_directories(config.out_dir);

    EntityCollection collection;
    similarity::Taxonomy taxonomy;
    try {
        collection = io::read_entities(config.entities);
        taxonomy = io::read_taxonomy(config.taxonomy);
    } catch (const std::exception& ex) {
        stage_error("ingest", ex);
    }

    geo::Projection projection;
    const fs::path pairs_path = config.out_dir / "pairs.csv";
    try {
        BlockOutput blocked = run_block(collection, config);
        projection = blocked.projection;
        if (config.write_blocks) {
            const fs::path blocks_path = config.out_dir / "blocks.csv";
            io::write_blocks_csv(blocks_path, blocked.blocks, collection);
            result.artifacts.push_back(blocks_path);
        }
        try {
            run_compare(blocked.pairs, collection, taxonomy, config);
        } catch (const std::exception& ex) {
            stage_error("compare", ex);
        }
        io::write_pairs_csv(pairs_path, blocked.pairs);
        result.artifacts.push_back(pairs_path);
    } catch (const std::exception& ex) {
        if (std::string(ex.what()).rfind("stage ", 0) == 0) throw;
        stage_error("block", ex);
    }

    const fs::path ranked_path = config.out_dir / "ranked.csv";
    try {
        io::PairTable table = io::read_pairs_csv(pairs_path);
        run_rank(table, config);
        io::write_pairs_csv(ranked_path, table);
        result.artifacts.push_back(ranked_path);
    } catch (const std::exception& ex) {
        stage_error("rank", ex);
    }

    const fs::path labeled_path = config.out_dir / "labeled.csv";
    const fs::path report_path = config.out_dir / "report.csv";
    try {
        io::PairTable table = io::read_pairs_csv(ranked_path);
        LabelOutput labeled = run_label(table, config);
        io::write_pairs_csv(labeled_path, table);
        write_report_csv(report_path, labeled);
        result.artifacts.push_back(labeled_path);
        result.artifacts.push_back(report_path);
        result.classification = labeled.result;
    } catch (const std::exception& ex) {
        stage_error("label", ex);
    }

    const fs::path summary_path = config.out_dir / "summary.txt";
    try {
        io::PairTable table = io::read_pairs_csv(labeled_path);
        std::vector<io::LabeledPair> full_truth;
        if (config.truth_file) full_truth = io::read_labels_csv(*config.truth_file);
        const bool have_truth =
            std::all_of(table.pairs.begin(), table.pairs.end(),
                        [](const CandidatePair& p) { return p.truth.has_value(); });
        std::string summary;
        if (have_truth && !table.pairs.empty()) {
            const eval::Report report = run_eval(table, full_truth);
            result.report = report;
            summary = "method=" + config.method +
                      " cutoff_k=" + std::to_string(result.classification.cutoff_k) +
                      " explored_levels=" + std::to_string(result.classification.explored_levels) +
                      " " + report.summary_line();
        } else {
            summary = "method=" + config.method +
                      " cutoff_k=" + std::to_string(result.classification.cutoff_k) +
                      " explored_levels=" + std::to_string(result.classification.explored_levels) +
                      " (no truth labels; evaluation skipped)";
        }
        std::ofstream out(summary_path, std::ios::binary);
        out << summary << '\n';
        result.artifacts.push_back(summary_path);
    } catch (const std::exception& ex) {
        stage_error("eval", ex);
    }

    result.manifest = config.out_dir / "manifest.json";
    io::Manifest manifest = build_manifest(config, projection);
    for (const auto& a : result.artifacts) manifest.outputs.push_back(a.string());
    io::write_manifest(result.manifest, manifest);
    return result;
}

RunResult run_from_manifest(const fs::path& manifest_path, const fs::path& out_dir) {
    const io::Manifest m = io::read_manifest(manifest_path);
    Config c;
    if (m.inputs.size() < 2) throw std::runtime_error("manifest lists no inputs");
    c.entities = m.inputs[0];
    c.taxonomy = m.inputs[1];
    if (m.inputs.size() > 2) c.truth_file = fs::path(m.inputs[2]);
    c.out_dir = out_dir;
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = m.parameters.find(key);
        return it == m.parameters.end() ? fallback : it->second;
    };
    c.meters = io::parse_double(get("meters", "100"));
    const std::string density = get("density", "unlimited");
    c.density = density == "unlimited" ? std::numeric_limits<double>::infinity()
                                       : io::parse_double(density);
    c.dims = get("dims", c.dims);
    c.method = get("method", c.method);
    c.window = std::stoi(get("window", "5"));
    c.sigma = io::parse_double(get("sigma", "1"));
    c.delta_metric = get("delta_metric", c.delta_metric);
    c.eq3_literal = get("eq3_literal", "0") == "1";
    c.truth = get("truth", c.truth);
    c.country_code = get("country_code", c.country_code);
    return run(c);
}

}  // namespace quadsky::pipeline
