// Command line front end. Subcommands mirror the pipeline stages so each can
// run in isolation against prior-stage artifacts; `run` chains them all.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "iftnet/iftnet.hpp"

namespace {

namespace fs = std::filesystem;
using namespace iftnet;

struct CliOverrides {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string segments; // comma-separated mode list
    double min_trade_value = 0.0;
    bool include_isolates = false;
    bool log_gdp = false;
    bool lenient = false;
    std::string out_dir;
};

std::vector<std::string> split_commas(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

// flag > config file > built-in default
RunConfig resolve_config(const CLI::App& cmd, const CliOverrides& ov)
{
    RunConfig config;
    if (!ov.config_path.empty())
        config = load_run_config(ov.config_path);
    if (cmd.count("--seed"))
        config.seed = ov.seed;
    if (cmd.count("--segments"))
        config.modes = split_commas(ov.segments);
    if (cmd.count("--min-trade-value"))
        config.min_trade_value = ov.min_trade_value;
    if (cmd.count("--include-isolates"))
        config.include_isolates = ov.include_isolates;
    if (cmd.count("--log-gdp"))
        config.log_gdp = ov.log_gdp;
    if (cmd.count("--lenient"))
        config.lenient = ov.lenient;
    if (cmd.count("--out"))
        config.out_dir = ov.out_dir;
    return config;
}

void add_common_flags(CLI::App* cmd, CliOverrides& ov)
{
    cmd->add_option("--config", ov.config_path, "run configuration JSON");
    cmd->add_option("--seed", ov.seed, "master seed");
    cmd->add_option("--segments", ov.segments,
                    "comma-separated analysis modes (segment names and/or 'inter')");
    cmd->add_option("--min-trade-value", ov.min_trade_value,
                    "drop trade flows below this value");
    cmd->add_flag("--include-isolates", ov.include_isolates,
                  "keep trading countries with no filtered ties");
    cmd->add_flag("--log-gdp", ov.log_gdp, "log-transform GDP and GDP per capita");
    cmd->add_flag("--lenient", ov.lenient, "drop-and-warn on dirty rows instead of failing");
    cmd->add_option("--out", ov.out_dir, "output directory");
}

Dataset load_for(const RunConfig& config, const SegmentConfig& segments)
{
    IngestOptions opt;
    opt.min_trade_value = config.min_trade_value;
    opt.lenient = config.lenient;
    return load_dataset(config.inputs, segments, opt);
}

void print_warnings(const Dataset& ds)
{
    for (const auto& w : ds.warnings)
        std::cerr << "warning: " << w << "\n";
}

void require_artifact(const std::string& path, const std::string& producer)
{
    if (!fs::exists(path))
        throw io_error("missing prior-stage artifact '" + path + "'; run `" + producer +
                       "` first");
}

int cmd_validate(const RunConfig& config)
{
    const SegmentConfig segments = config.resolve_segments();
    const auto modes = config.resolve_modes(segments);
    std::cout << "segment config ok: " << segments.segment_names().size() << " segments, "
              << segments.all_codes().size() << " product codes\n";
    std::cout << "modes ok:";
    for (const auto& m : modes)
        std::cout << " " << m.label();
    std::cout << "\n";
    for (const auto& t : config.terms)
        t.validate();
    std::cout << "model ok: " << config.terms.size() << " terms\n";
    if (!config.inputs.trade.empty()) {
        const Dataset ds = load_for(config, segments);
        print_warnings(ds);
        std::cout << "data ok: " << ds.net.countries().size() << " countries, "
                  << ds.net.firms().size() << " firms, " << ds.net.trade.edge_count()
                  << " trade flows, " << ds.net.ownership.edge_count() << " ownership ties\n";
    }
    return 0;
}

int cmd_build(const RunConfig& config)
{
    const SegmentConfig segments = config.resolve_segments();
    const Dataset ds = load_for(config, segments);
    print_warnings(ds);
    const std::string dir = config.out_dir + "/dataset";
    write_dataset(ds, dir, "build", config_hash(config));
    save_segment_config(segments, dir + "/segments.json");
    std::cout << "normalized dataset written to " << dir << "\n";
    return 0;
}

int cmd_filter(const RunConfig& config)
{
    const SegmentConfig segments = config.resolve_segments();
    const Dataset ds = load_for(config, segments);
    print_warnings(ds);
    const std::string hash = config_hash(config);
    for (const auto& mode : config.resolve_modes(segments)) {
        const std::string dir = config.out_dir + "/" + mode.label();
        fs::create_directories(dir);
        const auto motifs = detect_motifs(ds.net, mode);
        std::vector<std::string> extra;
        if (config.include_isolates)
            extra = trading_countries(ds.net);
        const auto fnet = build_filtered_network(motifs, mode, extra);
        write_motifs_csv(motifs, mode, dir + "/motifs.csv", hash);
        write_filtered_edges(fnet, dir + "/filtered_edges.csv", hash);
        if (mode.intra)
            write_firm_descriptives(firm_descriptives(ds.net, mode.segment),
                                    dir + "/firm_descriptives.csv", hash);
        std::cout << mode.label() << ": " << motifs.size() << " motifs, "
                  << fnet.graph.edge_count() << " filtered ties over "
                  << fnet.graph.node_count() << " countries\n";
    }
    return 0;
}

int cmd_stats(const RunConfig& config, const std::string& edges_path)
{
    const SegmentConfig segments = config.resolve_segments();
    auto emit = [&](const std::string& path, std::ostream& os) {
        const Graph g = read_filtered_edges(path);
        if (g.node_count() < 2)
            throw validation_error("'" + path + "': fewer than 2 countries");
        const NetworkSummary s = summarize(g);
        os << summary_csv_header() << "\n" << summary_csv_row(s) << "\n";
    };
    if (!edges_path.empty()) {
        emit(edges_path, std::cout);
        return 0;
    }
    const std::string hash = config_hash(config);
    for (const auto& mode : config.resolve_modes(segments)) {
        const std::string dir = config.out_dir + "/" + mode.label();
        require_artifact(dir + "/filtered_edges.csv", "filter");
        const Graph g = read_filtered_edges(dir + "/filtered_edges.csv");
        if (g.node_count() < 2)
            throw validation_error(mode.label() + ": fewer than 2 countries");
        CsvWriter w(dir + "/summary.csv");
        w.stage_comment("stats_" + mode.label(), hash);
        w.raw_line(summary_csv_header());
        w.raw_line(summary_csv_row(summarize(g)));
        w.close();
        std::cout << mode.label() << ": summary written\n";
    }
    return 0;
}

int cmd_fit(const RunConfig& config)
{
    const SegmentConfig segments = config.resolve_segments();
    const Dataset ds = load_for(config, segments);
    print_warnings(ds);
    const std::string hash = config_hash(config);
    for (const auto& mode : config.resolve_modes(segments)) {
        const std::string dir = config.out_dir + "/" + mode.label();
        require_artifact(dir + "/filtered_edges.csv", "filter");
        const Graph g = read_filtered_edges(dir + "/filtered_edges.csv");
        const ErgmModel model = bind_model(config.terms, g.node_ids(), ds.attributes,
                                           ds.dyads, config.log_gdp, mode);
        McmcParams params = config.mcmc;
        params.seed = derive_seed(config.seed, fnv1a64(mode.label()));
        const ErgmFit fit = mcmc_mle(g, model, params, config.estimation);
        write_fit_json(fit, dir + "/fit.json");
        write_fit_csv(fit, dir + "/fit.csv", hash);
        std::cout << mode.label() << ": converged in " << fit.iterations
                  << " iterations, log likelihood " << format_fixed(fit.log_likelihood, 4)
                  << "\n";
    }
    return 0;
}

int cmd_gof(const RunConfig& config)
{
    const SegmentConfig segments = config.resolve_segments();
    const Dataset ds = load_for(config, segments);
    print_warnings(ds);
    const std::string hash = config_hash(config);
    for (const auto& mode : config.resolve_modes(segments)) {
        const std::string dir = config.out_dir + "/" + mode.label();
        require_artifact(dir + "/filtered_edges.csv", "filter");
        require_artifact(dir + "/fit.json", "fit");
        const Graph g = read_filtered_edges(dir + "/filtered_edges.csv");
        const ErgmModel model = bind_model(config.terms, g.node_ids(), ds.attributes,
                                           ds.dyads, config.log_gdp, mode);

        std::ifstream in(dir + "/fit.json");
        nlohmann::json j;
        in >> j;
        ErgmFit fit;
        fit.converged = j.at("converged").get<bool>();
        fit.n_terms = model.term_count();
        const auto& terms = j.at("terms");
        if (terms.size() != model.term_count())
            throw validation_error(dir + "/fit.json: term count differs from the model");
        const auto names = model.term_names();
        for (std::size_t t = 0; t < model.term_count(); ++t) {
            if (terms[t].at("name").get<std::string>() != names[t])
                throw validation_error(dir + "/fit.json: term order differs from the model");
            fit.theta.push_back(terms[t].at("estimate").get<double>());
            fit.observed_stats.push_back(terms[t].at("observed_stat").get<double>());
        }

        McmcParams params = config.mcmc;
        params.seed = derive_seed(config.seed, fnv1a64(mode.label()));
        const GofReport report = goodness_of_fit(g, fit, model, config.gof_sims,
                                                 derive_seed(params.seed, 424242), params);
        write_gof(report, dir, hash);
        std::cout << mode.label() << ": GOF over " << report.n_simulations
                  << " simulations written\n";
    }
    return 0;
}

int cmd_simulate(const RunConfig& config, const std::string& theta_csv, std::size_t n_nodes,
                 std::size_t n_samples)
{
    std::vector<TermSpec> terms = config.terms;
    for (const auto& t : terms)
        if (t.kind == TermKind::activity || t.kind == TermKind::difference ||
            t.kind == TermKind::edge_covariate)
            throw validation_error("simulate: covariate terms need a dataset; use structural "
                                   "terms (edges, gw_degree, gwesp, gwdsp) in the config");
    const auto theta_fields = split_commas(theta_csv);
    if (theta_fields.size() != terms.size())
        throw validation_error("simulate: --theta needs " + std::to_string(terms.size()) +
                               " comma-separated values");
    std::vector<double> theta;
    for (const auto& f : theta_fields)
        theta.push_back(parse_double(f, "--theta"));

    const ErgmModel model = ErgmModel::structural(terms, n_nodes);
    McmcParams params = config.mcmc;
    params.seed = config.seed;
    params.sample_size = n_samples;
    const SampleResult res = sample_networks(model, theta, params, nullptr, false);

    fs::create_directories(config.out_dir);
    const std::string path = config.out_dir + "/simulated_stats.csv";
    CsvWriter w(path);
    w.stage_comment("simulate", config_hash(config));
    std::string header = "sample";
    for (const auto& n : model.term_names())
        header += "," + n;
    w.raw_line(header);
    for (Eigen::Index r = 0; r < res.statistics.rows(); ++r) {
        std::vector<std::string> row{std::to_string(r)};
        for (Eigen::Index c = 0; c < res.statistics.cols(); ++c)
            row.push_back(format_double(res.statistics(r, c)));
        w.row(row);
    }
    w.close();
    std::cout << "sampled " << n_samples << " networks (acceptance rate "
              << format_fixed(res.diagnostics.acceptance_rate(), 4) << "), statistics in "
              << path << "\n";
    return 0;
}

int cmd_synth(const RunConfig& config, std::size_t countries, std::size_t firms_per_segment,
              double ownership_prob, double trade_density, std::size_t planted)
{
    SynthSpec spec;
    spec.n_countries = countries;
    spec.config = config.resolve_segments();
    for (const auto& s : spec.config.segment_names())
        spec.firms_per_segment[s] = firms_per_segment;
    spec.ownership_prob = ownership_prob;
    spec.trade_density = trade_density;
    spec.planted_motifs = planted;
    spec.seed = config.seed;
    const SynthResult synth = generate_synthetic(spec);

    const std::string dir = config.out_dir;
    write_dataset(synth.dataset, dir, "synth", config_hash(config));
    save_segment_config(spec.config, dir + "/segments.json");
    write_motifs_csv(synth.planted, synth.planted_mode, dir + "/planted_motifs.csv",
                     config_hash(config));
    std::cout << "synthetic dataset in " << dir << ": "
              << synth.dataset.net.countries().size() << " countries, "
              << synth.dataset.net.firms().size() << " firms, " << synth.planted.size()
              << " planted motifs\n";
    return 0;
}

int cmd_run(const RunConfig& config)
{
    const PipelineResult result = run_pipeline(config);
    for (const auto& o : result.outcomes) {
        std::cout << o.label << ": " << o.status;
        if (o.status == "ok")
            std::cout << " (" << o.n_motifs << " motifs, " << o.n_edges << " ties over "
                      << o.n_nodes << " countries)";
        else
            std::cout << " at stage " << o.stage << ": " << o.message;
        std::cout << "\n";
    }
    std::cout << "manifest: " << config.out_dir << "/manifest.json (config hash "
              << result.hash << ")\n";
    for (const auto& o : result.outcomes)
        if (o.exit_code != 0)
            return o.exit_code;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"multilevel trade network filtering and ERGM toolkit"};
    app.require_subcommand(1);

    CliOverrides ov;
    std::string edges_path, theta_csv;
    std::size_t n_nodes = 10, n_samples = 100;
    std::size_t synth_countries = 12, synth_firms = 10, synth_planted = 3;
    double synth_ownership = 0.05, synth_density = 0.05;

    CLI::App* validate = app.add_subcommand("validate", "check config and input data");
    CLI::App* build = app.add_subcommand("build", "ingest and write the normalized dataset");
    CLI::App* filter = app.add_subcommand("filter", "detect motifs and emit filtered networks");
    CLI::App* stats = app.add_subcommand("stats", "summary statistics of filtered networks");
    CLI::App* fit = app.add_subcommand("fit", "estimate the ERGM on filtered networks");
    CLI::App* gof = app.add_subcommand("gof", "goodness of fit for fitted models");
    CLI::App* simulate = app.add_subcommand("simulate", "sample networks from a model");
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    CLI::App* run = app.add_subcommand("run", "full pipeline: all stages, all modes");

    for (CLI::App* cmd : {validate, build, filter, stats, fit, gof, simulate, synth, run})
        add_common_flags(cmd, ov);
    stats->add_option("--edges", edges_path, "filtered edge list CSV (print summary and exit)");
    simulate->add_option("--theta", theta_csv, "comma-separated coefficients")->required();
    simulate->add_option("--n-nodes", n_nodes, "network size");
    simulate->add_option("--n-samples", n_samples, "retained samples");
    synth->add_option("--countries", synth_countries, "country count");
    synth->add_option("--firms-per-segment", synth_firms, "firms per segment");
    synth->add_option("--ownership-prob", synth_ownership, "ownership tie probability");
    synth->add_option("--trade-density", synth_density, "trade edge probability per code");
    synth->add_option("--planted", synth_planted, "planted motif count");

    try {
        app.parse(argc, argv);
        CLI::App* active = app.get_subcommands().front();
        const RunConfig config = resolve_config(*active, ov);
        if (active == validate)
            return cmd_validate(config);
        if (active == build)
            return cmd_build(config);
        if (active == filter)
            return cmd_filter(config);
        if (active == stats)
            return cmd_stats(config, edges_path);
        if (active == fit)
            return cmd_fit(config);
        if (active == gof)
            return cmd_gof(config);
        if (active == simulate)
            return cmd_simulate(config, theta_csv, n_nodes, n_samples);
        if (active == synth)
            return cmd_synth(config, synth_countries, synth_firms, synth_ownership,
                             synth_density, synth_planted);
        if (active == run)
            return cmd_run(config);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const iftnet::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const iftnet::estimation_error& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 2;
    } catch (const iftnet::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
