#pragma once

#include <json.hpp>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "iftnet/ergm/report.hpp"
#include "iftnet/gof.hpp"
#include "iftnet/motif.hpp"
#include "iftnet/multilevel.hpp"
#include "iftnet/netstats.hpp"
#include "iftnet/synth.hpp"

namespace iftnet {

inline constexpr const char* version_string = "0.3.0";

// The paper-table model: structural terms, activity/difference pairs for the
// four country attributes plus the derived investment (firm count) measure,
// and the three dyadic covariates. 17 terms.
inline std::vector<TermSpec> default_model_terms(double decay = 0.5)
{
    return {
        TermSpec::edges(),
        TermSpec::gw_degree(decay),
        TermSpec::gwesp(decay),
        TermSpec::gwdsp(decay),
        TermSpec::activity("gdp", "GDP Activity"),
        TermSpec::difference("gdp", "GDP Difference"),
        TermSpec::activity("gdp_per_capita", "GDP per capita Activity"),
        TermSpec::difference("gdp_per_capita", "GDP per capita Difference"),
        TermSpec::activity("rule_of_law", "Rule of Law Activity"),
        TermSpec::difference("rule_of_law", "Rule of Law Difference"),
        TermSpec::activity("contract_days", "Contract Enforcement Activity"),
        TermSpec::difference("contract_days", "Contract Enforcement Difference"),
        TermSpec::activity("firm_count", "Investment Activity"),
        TermSpec::difference("firm_count", "Investment Difference"),
        TermSpec::edge_covariate("distance", "Distance"),
        TermSpec::edge_covariate("common_language", "Common Language"),
        TermSpec::edge_covariate("shared_border", "Shared Border"),
    };
}

struct RunConfig {
    DatasetPaths inputs;
    std::string segments_file;      // empty: built-in defaults
    std::vector<std::string> modes; // segment names and/or "inter"
    std::vector<TermSpec> terms = default_model_terms();
    McmcParams mcmc;
    EstimationOptions estimation;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double min_trade_value = 0.0;
    bool include_isolates = false;
    bool log_gdp = false;
    bool lenient = false;
    std::size_t gof_sims = 100;

    SegmentConfig resolve_segments() const
    {
        return segments_file.empty() ? default_segment_config()
                                     : load_segment_config(segments_file);
    }

    std::vector<SegmentMode> resolve_modes(const SegmentConfig& segments) const
    {
        std::vector<std::string> wanted = modes;
        if (wanted.empty()) {
            wanted = segments.segment_names();
            wanted.push_back("inter");
        }
        std::vector<SegmentMode> out;
        for (const auto& m : wanted) {
            if (m == "inter") {
                out.push_back(SegmentMode::inter());
            } else {
                if (!segments.has_segment(m))
                    throw validation_error("config: unknown segment '" + m + "'");
                out.push_back(SegmentMode::intra_segment(m));
            }
        }
        return out;
    }
};

namespace detail {

inline TermKind term_kind_from_string(const std::string& s)
{
    if (s == "edges")
        return TermKind::edges;
    if (s == "gw_degree")
        return TermKind::gw_degree;
    if (s == "gwesp")
        return TermKind::gwesp;
    if (s == "gwdsp")
        return TermKind::gwdsp;
    if (s == "activity")
        return TermKind::activity;
    if (s == "difference")
        return TermKind::difference;
    if (s == "edge_covariate")
        return TermKind::edge_covariate;
    throw validation_error("config: unknown term kind '" + s + "'");
}

inline nlohmann::json term_to_json(const TermSpec& t)
{
    nlohmann::json j{{"kind", to_string(t.kind)}};
    if (is_geometrically_weighted(t.kind))
        j["decay"] = t.decay;
    if (!t.attribute.empty())
        j["attribute"] = t.attribute;
    if (!t.label.empty())
        j["label"] = t.label;
    return j;
}

inline TermSpec term_from_json(const nlohmann::json& j)
{
    TermSpec t;
    t.kind = term_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("decay"))
        t.decay = j.at("decay").get<double>();
    if (j.contains("attribute"))
        t.attribute = j.at("attribute").get<std::string>();
    if (j.contains("label"))
        t.label = j.at("label").get<std::string>();
    t.validate();
    return t;
}

} // namespace detail

inline nlohmann::json run_config_to_json(const RunConfig& c)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : c.terms)
        terms.push_back(detail::term_to_json(t));
    return {{"inputs",
             {{"trade", c.inputs.trade},
              {"ownership", c.inputs.ownership},
              {"affiliation", c.inputs.affiliation},
              {"firms", c.inputs.firms},
              {"attributes", c.inputs.attributes},
              {"dyads", c.inputs.dyads}}},
            {"segments_file", c.segments_file},
            {"modes", c.modes},
            {"terms", terms},
            {"mcmc",
             {{"burn_in", c.mcmc.burn_in},
              {"interval", c.mcmc.interval},
              {"sample_size", c.mcmc.sample_size},
              {"chains", c.mcmc.chains}}},
            {"out_dir", c.out_dir},
            {"seed", c.seed},
            {"min_trade_value", c.min_trade_value},
            {"include_isolates", c.include_isolates},
            {"log_gdp", c.log_gdp},
            {"lenient", c.lenient},
            {"gof_sims", c.gof_sims}};
}

inline RunConfig run_config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    if (j.contains("inputs")) {
        const auto& in = j.at("inputs");
        auto get = [&](const char* key, std::string& slot) {
            if (in.contains(key))
                slot = in.at(key).get<std::string>();
        };
        get("trade", c.inputs.trade);
        get("ownership", c.inputs.ownership);
        get("affiliation", c.inputs.affiliation);
        get("firms", c.inputs.firms);
        get("attributes", c.inputs.attributes);
        get("dyads", c.inputs.dyads);
    }
    if (j.contains("segments_file"))
        c.segments_file = j.at("segments_file").get<std::string>();
    if (j.contains("modes"))
        c.modes = j.at("modes").get<std::vector<std::string>>();
    if (j.contains("terms")) {
        c.terms.clear();
        for (const auto& t : j.at("terms"))
            c.terms.push_back(detail::term_from_json(t));
    }
    if (j.contains("mcmc")) {
        const auto& m = j.at("mcmc");
        if (m.contains("burn_in"))
            c.mcmc.burn_in = m.at("burn_in").get<std::size_t>();
        if (m.contains("interval"))
            c.mcmc.interval = m.at("interval").get<std::size_t>();
        if (m.contains("sample_size"))
            c.mcmc.sample_size = m.at("sample_size").get<std::size_t>();
        if (m.contains("chains"))
            c.mcmc.chains = m.at("chains").get<std::size_t>();
    }
    if (j.contains("out_dir"))
        c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("min_trade_value"))
        c.min_trade_value = j.at("min_trade_value").get<double>();
    if (j.contains("include_isolates"))
        c.include_isolates = j.at("include_isolates").get<bool>();
    if (j.contains("log_gdp"))
        c.log_gdp = j.at("log_gdp").get<bool>();
    if (j.contains("lenient"))
        c.lenient = j.at("lenient").get<bool>();
    if (j.contains("gof_sims"))
        c.gof_sims = j.at("gof_sims").get<std::size_t>();
    return c;
}

inline RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("config '" + path + "': " + e.what());
    }
    return run_config_from_json(j);
}

// nlohmann keeps object keys sorted, so the dump is canonical
inline std::string config_hash(const RunConfig& c)
{
    return hex64(fnv1a64(run_config_to_json(c).dump()));
}

// Model bound to a node set: resolves node attributes (with the derived
// firm_count per mode) and dyad covariate matrices.
inline ErgmModel bind_model(const std::vector<TermSpec>& terms,
                            const std::vector<std::string>& node_ids,
                            const CountryAttributes& attributes, const DyadCovariates& dyads,
                            bool log_gdp, const SegmentMode& mode)
{
    ErgmModel model(terms, node_ids);
    const std::string firm_count_segment = mode.intra ? mode.segment : "";
    for (const auto& t : terms) {
        if (t.kind == TermKind::activity || t.kind == TermKind::difference)
            model.bind_attribute(t.attribute,
                                 attributes.attribute_vector(t.attribute, model.node_ids(),
                                                             log_gdp, firm_count_segment));
        else if (t.kind == TermKind::edge_covariate)
            model.bind_dyad_matrix(t.attribute, dyads.matrix(t.attribute, model.node_ids()));
    }
    return model;
}

// countries incident to at least one trade flow, the isolate-retention universe
inline std::vector<std::string> trading_countries(const MultilevelNetwork& net)
{
    std::vector<std::string> out;
    for (std::size_t v = 0; v < net.trade.node_count(); ++v)
        if (net.trade.out_degree(v) > 0 || net.trade.in_degree(v) > 0)
            out.push_back(net.trade.id_of(v));
    return out;
}

struct ModeOutcome {
    std::string label;
    std::string status = "ok"; // or "failed"
    std::string stage;         // stage that failed
    std::string message;
    int exit_code = 0; // error class of the failure, CLI exit-code convention
    std::uint64_t seed = 0;
    std::size_t n_nodes = 0, n_edges = 0, n_motifs = 0;
    bool fitted = false;
};

struct PipelineResult {
    std::vector<ModeOutcome> outcomes;
    std::string hash;

    bool all_ok() const
    {
        for (const auto& o : outcomes)
            if (o.status != "ok")
                return false;
        return true;
    }
};

inline PipelineResult run_pipeline(const RunConfig& config)
{
    namespace fs = std::filesystem;
    const SegmentConfig segments = config.resolve_segments();
    const std::vector<SegmentMode> modes = config.resolve_modes(segments);
    const std::string hash = config_hash(config);

    IngestOptions ingest;
    ingest.min_trade_value = config.min_trade_value;
    ingest.lenient = config.lenient;
    const Dataset ds = load_dataset(config.inputs, segments, ingest);

    PipelineResult result;
    result.hash = hash;
    fs::create_directories(config.out_dir);

    for (const auto& mode : modes) {
        ModeOutcome outcome;
        outcome.label = mode.label();
        outcome.seed = derive_seed(config.seed, fnv1a64(mode.label()));
        const std::string dir = config.out_dir + "/" + mode.label();
        fs::create_directories(dir);
        std::string stage = "filter";
        try {
            const std::vector<Motif> motifs = detect_motifs(ds.net, mode);
            outcome.n_motifs = motifs.size();
            std::vector<std::string> extra;
            if (config.include_isolates)
                extra = trading_countries(ds.net);
            const FilteredTradeNetwork fnet = build_filtered_network(motifs, mode, extra);
            outcome.n_nodes = fnet.graph.node_count();
            outcome.n_edges = fnet.graph.edge_count();
            write_motifs_csv(motifs, mode, dir + "/motifs.csv", hash);
            write_filtered_edges(fnet, dir + "/filtered_edges.csv", hash);
            if (mode.intra)
                write_firm_descriptives(firm_descriptives(ds.net, mode.segment),
                                        dir + "/firm_descriptives.csv", hash);

            stage = "stats";
            if (fnet.graph.node_count() < 2)
                throw validation_error("filtered network has fewer than 2 countries");
            const NetworkSummary summary = summarize(fnet.graph);
            {
                CsvWriter w(dir + "/summary.csv");
                w.stage_comment("stats_" + mode.label(), hash);
                w.raw_line(summary_csv_header());
                w.raw_line(summary_csv_row(summary));
                w.close();
            }

            stage = "fit";
            const ErgmModel model = bind_model(config.terms, fnet.graph.node_ids(),
                                               ds.attributes, ds.dyads, config.log_gdp, mode);
            McmcParams params = config.mcmc;
            params.seed = outcome.seed;
            const ErgmFit fit = mcmc_mle(fnet.graph, model, params, config.estimation);
            write_fit_json(fit, dir + "/fit.json");
            write_fit_csv(fit, dir + "/fit.csv", hash);
            outcome.fitted = true;

            stage = "gof";
            const GofReport gof = goodness_of_fit(fnet.graph, fit, model, config.gof_sims,
                                                  derive_seed(outcome.seed, 424242), params);
            write_gof(gof, dir, hash);
        } catch (const error& e) {
            outcome.status = "failed";
            outcome.stage = stage;
            outcome.message = e.what();
            if (dynamic_cast<const estimation_error*>(&e))
                outcome.exit_code = 2;
            else if (dynamic_cast<const io_error*>(&e))
                outcome.exit_code = 3;
            else
                outcome.exit_code = 1;
        }
        result.outcomes.push_back(std::move(outcome));
    }

    // manifest: everything needed to replay the run
    nlohmann::json mode_entries = nlohmann::json::array();
    for (const auto& o : result.outcomes) {
        nlohmann::json entry{{"mode", o.label},   {"status", o.status},
                             {"seed", o.seed},    {"n_nodes", o.n_nodes},
                             {"n_edges", o.n_edges}, {"n_motifs", o.n_motifs},
                             {"fitted", o.fitted}};
        if (o.status != "ok") {
            entry["stage"] = o.stage;
            entry["error"] = o.message;
        }
        mode_entries.push_back(entry);
    }
    nlohmann::json manifest{{"version", version_string},
                            {"config_hash", hash},
                            {"seed", config.seed},
                            {"config", run_config_to_json(config)},
                            {"modes", mode_entries}};
    for (const auto& w : ds.warnings)
        manifest["warnings"].push_back(w);
    std::ofstream out(config.out_dir + "/manifest.json");
    if (!out)
        throw io_error("cannot open manifest for writing");
    out << manifest.dump(2) << "\n";
    if (!out)
        throw io_error("manifest write failed");
    return result;
}

// filtered edge list round-trip for the stage-isolated stats subcommand
inline Graph read_filtered_edges(const std::string& path)
{
    std::set<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& r : read_csv(path, {"iso3_a", "iso3_b", "n_motifs"})) {
        nodes.insert(r.fields[0]);
        if (r.fields[1].empty())
            continue; // node-only row for a retained isolate
        nodes.insert(r.fields[1]);
        edges.emplace_back(r.fields[0], r.fields[1]);
    }
    Graph g(EdgeMode::undirected, {nodes.begin(), nodes.end()});
    for (const auto& [a, b] : edges)
        g.add_edge(a, b);
    return g;
}

} // namespace iftnet
