#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "iftnet/pipeline.hpp"

using namespace iftnet;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

DatasetRows bind_rows()
{
    DatasetRows rows;
    rows.trade = {
        {"USA", "DEU", "71321", 120.0},
        {"DEU", "USA", "71321", 80.0},
        {"USA", "JPN", "76211", 40.0},
    };
    rows.ownership = {{"f1", "f2"}};
    rows.affiliation = {
        {"f1", "USA"}, {"f2", "DEU"}, {"f3", "JPN"}, {"f4", "DEU"}, {"f4", "USA"},
    };
    rows.firms = {
        {"f1", "Engines & Parts", 100.0, 50.0},
        {"f2", "Engines & Parts", 200.0, 80.0},
        {"f3", "Electrical Parts", 50.0, 20.0},
        {"f4", "Electrical Parts", 300.0, 120.0},
    };
    rows.attributes = {
        {"USA", 1000.0, 40.0, 1.5, 300.0},
        {"DEU", 500.0, 35.0, 1.7, 400.0},
        {"JPN", 400.0, 30.0, 1.4, 350.0},
    };
    rows.dyads = {
        {"USA", "DEU", 6000.0, 0, 0},
        {"USA", "JPN", 10000.0, 0, 0},
        {"DEU", "JPN", 9000.0, 0, 0},
    };
    return rows;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file())
            continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream body;
        body << in.rdbuf();
        files[fs::relative(entry.path(), root).generic_string()] = body.str();
    }
    return files;
}

} // namespace

TEST_CASE("default model has the full term set", "[pipeline]")
{
    const std::vector<TermSpec> terms = default_model_terms();
    REQUIRE(terms.size() == 17);
    CHECK(terms[0].kind == TermKind::edges);
    CHECK(terms[1].kind == TermKind::gw_degree);
    CHECK(terms[2].kind == TermKind::gwesp);
    CHECK(terms[3].kind == TermKind::gwdsp);
    CHECK(terms[1].decay == 0.5);
    CHECK(terms[4].attribute == "gdp");
    CHECK(terms[4].label == "GDP Activity");
    CHECK(terms[5].label == "GDP Difference");
    CHECK(terms[10].attribute == "contract_days");
    CHECK(terms[10].label == "Contract Enforcement Activity");
    CHECK(terms[12].attribute == "firm_count");
    CHECK(terms[12].label == "Investment Activity");
    CHECK(terms[14].kind == TermKind::edge_covariate);
    CHECK(terms[14].attribute == "distance");
    CHECK(terms[16].label == "Shared Border");

    const std::vector<TermSpec> slow = default_model_terms(1.2);
    CHECK(slow[2].decay == 1.2);

    // the full set binds against a dataset with the standard attributes
    const Dataset ds = build_dataset(bind_rows(), default_segment_config());
    CHECK_NOTHROW(bind_model(terms, {"DEU", "JPN", "USA"}, ds.attributes, ds.dyads, false,
                             SegmentMode::inter()));
}

TEST_CASE("mode resolution covers segments plus inter", "[pipeline]")
{
    const SegmentConfig segments = default_segment_config();
    RunConfig config;

    const std::vector<SegmentMode> all = config.resolve_modes(segments);
    REQUIRE(all.size() == 4);
    CHECK(all[0] == SegmentMode::intra_segment("Electrical Parts"));
    CHECK(all[1] == SegmentMode::intra_segment("Engines & Parts"));
    CHECK(all[2] == SegmentMode::intra_segment("Rubber & Metal Parts"));
    CHECK(all[3] == SegmentMode::inter());

    config.modes = {"inter", "Engines & Parts"};
    const std::vector<SegmentMode> picked = config.resolve_modes(segments);
    REQUIRE(picked.size() == 2);
    CHECK_FALSE(picked[0].intra);
    CHECK(picked[1].segment == "Engines & Parts");

    config.modes = {"Confectionery"};
    CHECK_THROWS_WITH(config.resolve_modes(segments), ContainsSubstring("unknown segment"));
}

TEST_CASE("run config survives the json round trip", "[pipeline]")
{
    RunConfig config;
    config.inputs = {"t.csv", "o.csv", "a.csv", "f.csv", "at.csv", "d.csv"};
    config.modes = {"inter"};
    config.terms = {TermSpec::edges(), TermSpec::gwesp(0.25),
                    TermSpec::edge_covariate("distance", "Distance")};
    config.mcmc.burn_in = 500;
    config.mcmc.sample_size = 123;
    config.out_dir = "elsewhere";
    config.seed = 99;
    config.min_trade_value = 2.5;
    config.log_gdp = true;
    config.gof_sims = 7;

    const RunConfig back = run_config_from_json(run_config_to_json(config));
    CHECK(back.inputs.trade == "t.csv");
    CHECK(back.inputs.dyads == "d.csv");
    CHECK(back.modes == config.modes);
    REQUIRE(back.terms.size() == 3);
    CHECK(back.terms[1].kind == TermKind::gwesp);
    CHECK(back.terms[1].decay == 0.25);
    CHECK(back.terms[2].attribute == "distance");
    CHECK(back.mcmc.burn_in == 500);
    CHECK(back.mcmc.sample_size == 123);
    CHECK(back.out_dir == "elsewhere");
    CHECK(back.seed == 99);
    CHECK(back.min_trade_value == 2.5);
    CHECK(back.log_gdp);
    CHECK(back.gof_sims == 7);
    CHECK(config_hash(back) == config_hash(config));
}

TEST_CASE("config hash is stable and input sensitive", "[pipeline]")
{
    RunConfig a;
    RunConfig b;
    CHECK(config_hash(a) == config_hash(b));
    REQUIRE(config_hash(a).size() == 16);

    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));

    b = a;
    b.terms[1] = TermSpec::gw_degree(0.7);
    CHECK(config_hash(a) != config_hash(b));

    b = a;
    b.modes = {"inter"};
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("bound models resolve transforms and firm counts per mode", "[pipeline]")
{
    const Dataset ds = build_dataset(bind_rows(), default_segment_config());
    Graph g(EdgeMode::undirected, {"DEU", "JPN", "USA"});
    g.add_edge("USA", "DEU");

    SECTION("log transform applies to gdp")
    {
        const std::vector<TermSpec> terms{TermSpec::edges(),
                                          TermSpec::activity("gdp", "GDP Activity")};
        const ErgmModel raw =
            bind_model(terms, g.node_ids(), ds.attributes, ds.dyads, false, SegmentMode::inter());
        const ErgmModel logged =
            bind_model(terms, g.node_ids(), ds.attributes, ds.dyads, true, SegmentMode::inter());
        CHECK_THAT(compute_statistics(g, raw)[1], WithinAbs(1500.0, 1e-9));
        CHECK_THAT(compute_statistics(g, logged)[1],
                   WithinAbs(std::log(1000.0) + std::log(500.0), 1e-12));
    }

    SECTION("firm_count is per segment intra and distinct total inter")
    {
        const std::vector<TermSpec> terms{TermSpec::edges(),
                                          TermSpec::activity("firm_count", "Investment Activity")};
        const ErgmModel intra =
            bind_model(terms, g.node_ids(), ds.attributes, ds.dyads, false,
                       SegmentMode::intra_segment("Engines & Parts"));
        const ErgmModel inter =
            bind_model(terms, g.node_ids(), ds.attributes, ds.dyads, false, SegmentMode::inter());
        // Engines: USA 1, DEU 1; totals: USA 2, DEU 2
        CHECK_THAT(compute_statistics(g, intra)[1], WithinAbs(2.0, 1e-12));
        CHECK_THAT(compute_statistics(g, inter)[1], WithinAbs(4.0, 1e-12));
    }

    SECTION("dyad covariates come from the matrix")
    {
        const std::vector<TermSpec> terms{TermSpec::edges(),
                                          TermSpec::edge_covariate("distance", "Distance")};
        const ErgmModel model =
            bind_model(terms, g.node_ids(), ds.attributes, ds.dyads, false, SegmentMode::inter());
        CHECK_THAT(compute_statistics(g, model)[1], WithinAbs(6000.0, 1e-9));
    }
}

TEST_CASE("trading countries require an incident flow", "[pipeline]")
{
    DatasetRows rows = bind_rows();
    rows.affiliation.push_back({"f5", "KOR"});
    rows.firms.push_back({"f5", "Engines & Parts", 10.0, 5.0});
    rows.attributes.push_back({"KOR", 300.0, 25.0, 1.0, 500.0});
    rows.dyads.push_back({"KOR", "USA", 11000.0, 0, 0});
    rows.dyads.push_back({"KOR", "DEU", 8500.0, 0, 0});
    rows.dyads.push_back({"KOR", "JPN", 1000.0, 0, 1});
    const Dataset ds = build_dataset(rows, default_segment_config());

    REQUIRE(ds.net.trade.contains("KOR"));
    const std::vector<std::string> trading = trading_countries(ds.net);
    CHECK(trading == std::vector<std::string>{"DEU", "JPN", "USA"});
}

TEST_CASE("filtered edge lists round trip", "[pipeline]")
{
    const std::vector<Motif> motifs{
        {"AAA", "BBB", "f1", "f2", "71321", TradeDirection::a_to_b},
        {"AAA", "BBB", "f3", "f4", "71322", TradeDirection::both},
        {"AAA", "CCC", "f1", "f5", "71321", TradeDirection::b_to_a},
    };
    const FilteredTradeNetwork fnet =
        build_filtered_network(motifs, SegmentMode::intra_segment("Engines & Parts"), {"DDD"});

    const fs::path path = fs::temp_directory_path() / "iftnet_filtered_roundtrip.csv";
    fs::remove(path);
    write_filtered_edges(fnet, path.string(), "cafe");

    const Graph back = read_filtered_edges(path.string());
    CHECK(back.node_ids() == fnet.graph.node_ids());
    CHECK(back.edges() == fnet.graph.edges());
    fs::remove(path);
}

TEST_CASE("pipeline runs end to end and is replay stable", "[pipeline][slow]")
{
    const fs::path root = fs::temp_directory_path() / "iftnet_pipeline_run";
    fs::remove_all(root);
    fs::create_directories(root);

    SynthSpec spec;
    spec.n_countries = 10;
    spec.seed = 77;
    spec.firms_per_segment = {{"Electrical Parts", 8}, {"Engines & Parts", 14},
                              {"Rubber & Metal Parts", 8}};
    spec.ownership_prob = 0.15;
    spec.trade_density = 0.25;
    spec.planted_motifs = 4;
    const SynthResult synth = generate_synthetic(spec);
    const DatasetPaths paths = write_dataset(synth.dataset, (root / "data").string());

    RunConfig config;
    config.inputs = paths;
    config.modes = {"Engines & Parts"};
    config.terms = {TermSpec::edges()};
    config.mcmc.burn_in = 3000;
    config.mcmc.interval = 5;
    config.mcmc.sample_size = 600;
    config.mcmc.chains = 2;
    config.out_dir = (root / "out").string();
    config.seed = 11;
    config.gof_sims = 25;

    const PipelineResult first = run_pipeline(config);
    REQUIRE(first.outcomes.size() == 1);
    const ModeOutcome& outcome = first.outcomes[0];
    INFO(outcome.stage << ": " << outcome.message);
    REQUIRE(outcome.status == "ok");
    CHECK(outcome.label == "intra_Engines & Parts");
    CHECK(outcome.n_motifs >= 4);
    CHECK(outcome.n_nodes >= 3);
    CHECK(outcome.fitted);
    CHECK(first.all_ok());

    const fs::path mode_dir = root / "out" / outcome.label;
    for (const char* name : {"motifs.csv", "filtered_edges.csv", "firm_descriptives.csv",
                             "summary.csv", "fit.json", "fit.csv", "gof_summary.json"})
        CHECK(fs::exists(mode_dir / name));

    nlohmann::json manifest;
    std::ifstream(root / "out" / "manifest.json") >> manifest;
    CHECK(manifest.at("config_hash").get<std::string>() == first.hash);
    CHECK(manifest.at("seed").get<std::uint64_t>() == 11);
    REQUIRE(manifest.at("modes").size() == 1);
    CHECK(manifest.at("modes")[0].at("status") == "ok");
    CHECK(manifest.at("modes")[0].at("fitted").get<bool>());

    // replay with the identical config overwrites every artifact byte for byte
    const std::map<std::string, std::string> before = snapshot_tree(root / "out");
    const PipelineResult second = run_pipeline(config);
    REQUIRE(second.outcomes[0].status == "ok");
    const std::map<std::string, std::string> after = snapshot_tree(root / "out");
    REQUIRE(before.size() == after.size());
    CHECK(before == after);

    fs::remove_all(root);
}
