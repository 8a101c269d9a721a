#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "iftnet/multilevel.hpp"

using namespace iftnet;
using Catch::Matchers::WithinAbs;

namespace {

// three countries, four firms, two segments of the default config
DatasetRows small_rows()
{
    DatasetRows rows;
    rows.trade = {{"USA", "DEU", "71321", 120.0},
                  {"DEU", "USA", "71321", 80.0},
                  {"USA", "JPN", "76211", 40.0},
                  {"JPN", "DEU", "71322", 15.0}};
    rows.ownership = {{"f1", "f2"}, {"f3", "f4"}};
    rows.affiliation = {{"f1", "USA"}, {"f2", "DEU"}, {"f3", "JPN"}, {"f4", "DEU"},
                        {"f4", "USA"}};
    rows.firms = {{"f1", "Engines & Parts", 100.0, 50.0},
                  {"f2", "Engines & Parts", 300.0, std::nullopt},
                  {"f3", "Electrical Parts", 40.0, 10.0},
                  {"f4", "Electrical Parts", std::nullopt, std::nullopt}};
    rows.attributes = {{"USA", 2000.0, 55.0, 1.5, 300.0},
                       {"DEU", 900.0, 48.0, 1.6, 400.0},
                       {"JPN", 1100.0, 42.0, 1.4, 350.0}};
    rows.dyads = {{"USA", "DEU", 6000.0, 0, 0},
                  {"USA", "JPN", 10000.0, 0, 0},
                  {"DEU", "JPN", 9000.0, 0, 0}};
    return rows;
}

} // namespace

TEST_CASE("build_dataset assembles the three layers", "[ingest]")
{
    const Dataset ds = build_dataset(small_rows(), default_segment_config(), {});
    const MultilevelNetwork& net = ds.net;

    CHECK(net.countries() == std::vector<std::string>{"DEU", "JPN", "USA"});
    CHECK(net.firms() == std::vector<std::string>{"f1", "f2", "f3", "f4"});

    const std::size_t usa = net.trade.index_of("USA");
    const std::size_t deu = net.trade.index_of("DEU");
    const std::size_t jpn = net.trade.index_of("JPN");
    CHECK(net.trade.has_edge(usa, deu));
    CHECK(net.trade.has_edge(deu, usa));
    CHECK(net.trade.has_edge(usa, jpn));
    CHECK_FALSE(net.trade.has_edge(jpn, usa));
    CHECK(net.has_trade(usa, deu, "71321"));
    CHECK_FALSE(net.has_trade(usa, deu, "76211"));

    CHECK(net.ownership.has_edge(net.ownership.index_of("f1"), net.ownership.index_of("f2")));
    CHECK_FALSE(
        net.ownership.has_edge(net.ownership.index_of("f2"), net.ownership.index_of("f1")));

    CHECK(net.affiliation.left_degree(net.affiliation.left_index("f4")) == 2);
    CHECK(net.firm_segments.at("f1") == std::set<std::string>{"Engines & Parts"});
    CHECK(net.trade_values.at({"USA", "DEU"}).at("71321") == 120.0);
    CHECK(ds.warnings.empty());
}

TEST_CASE("firm counts derive from the affiliation layer", "[ingest]")
{
    const Dataset ds = build_dataset(small_rows(), default_segment_config(), {});
    CHECK(ds.attributes.firm_count.at("DEU").at("Engines & Parts") == 1);
    CHECK(ds.attributes.firm_count.at("DEU").at("Electrical Parts") == 1);
    CHECK(ds.attributes.firm_count.at("USA").at("Engines & Parts") == 1);
    CHECK(ds.attributes.firm_count_total.at("DEU") == 2);
    CHECK(ds.attributes.firm_count_total.at("USA") == 2);
    CHECK(ds.attributes.firm_count_total.at("JPN") == 1);
}

TEST_CASE("attribute vectors honor transforms and segment scope", "[ingest]")
{
    const Dataset ds = build_dataset(small_rows(), default_segment_config(), {});
    const std::vector<std::string> order{"DEU", "JPN", "USA"};

    const auto gdp = ds.attributes.attribute_vector("gdp", order);
    REQUIRE(gdp.size() == 3);
    CHECK(gdp[0] == 900.0);
    CHECK(gdp[2] == 2000.0);

    const auto log_gdp = ds.attributes.attribute_vector("gdp", order, true);
    CHECK_THAT(log_gdp[0], WithinAbs(std::log(900.0), 1e-12));

    const auto fc_total = ds.attributes.attribute_vector("firm_count", order);
    CHECK(fc_total == std::vector<double>{2.0, 1.0, 2.0});
    const auto fc_seg =
        ds.attributes.attribute_vector("firm_count", order, false, "Engines & Parts");
    CHECK(fc_seg == std::vector<double>{1.0, 0.0, 1.0});

    CHECK_THROWS_AS(ds.attributes.attribute_vector("population", order), validation_error);
    CHECK_THROWS_AS(ds.attributes.attribute_vector("gdp", {"DEU", "FRA"}), validation_error);
}

TEST_CASE("dyad matrices are symmetric with hard missing-pair errors", "[ingest]")
{
    const Dataset ds = build_dataset(small_rows(), default_segment_config(), {});
    const std::vector<std::string> order{"DEU", "JPN", "USA"};
    const auto m = ds.dyads.matrix("distance", order);
    REQUIRE(m.size() == 9);
    CHECK(m[0 * 3 + 2] == 6000.0);
    CHECK(m[2 * 3 + 0] == 6000.0);
    CHECK(m[0 * 3 + 1] == 9000.0);
    CHECK(m[0 * 3 + 0] == 0.0);
    CHECK_THROWS_AS(ds.dyads.matrix("distance", {"DEU", "JPN", "USA", "FRA"}),
                    validation_error);
    CHECK_THROWS_AS(ds.dyads.matrix("tariff", order), validation_error);
}

TEST_CASE("strict ingest rejects malformed rows", "[ingest]")
{
    const SegmentConfig cfg = default_segment_config();

    auto expect_reject = [&](DatasetRows rows) {
        CHECK_THROWS_AS(build_dataset(rows, cfg, {}), validation_error);
    };

    DatasetRows rows = small_rows();
    rows.trade.push_back({"usa", "DEU", "71321", 5.0}); // lowercase iso3
    expect_reject(rows);

    rows = small_rows();
    rows.trade.push_back({"USA", "USA", "71321", 5.0}); // self loop
    expect_reject(rows);

    rows = small_rows();
    rows.trade.push_back({"USA", "DEU", "99999", 5.0}); // code outside config
    expect_reject(rows);

    rows = small_rows();
    rows.trade.push_back({"USA", "DEU", "71321", 0.0}); // non-positive value
    expect_reject(rows);

    rows = small_rows();
    rows.trade.push_back({"USA", "DEU", "71321", 7.0}); // duplicate flow
    expect_reject(rows);

    rows = small_rows();
    rows.ownership.push_back({"f1", "f9"}); // firm without affiliation
    expect_reject(rows);

    rows = small_rows();
    rows.ownership.push_back({"f1", "f1"}); // ownership self loop
    expect_reject(rows);

    rows = small_rows();
    rows.attributes.push_back({"FRA", 1.0, 1.0, 0.0, 100.0}); // country not in network
    expect_reject(rows);

    rows = small_rows();
    rows.attributes[0].contract_days = -1.0;
    expect_reject(rows);

    rows = small_rows();
    rows.dyads[0].common_language = 2; // flags are 0/1
    expect_reject(rows);

    rows = small_rows();
    rows.dyads[0].distance = -10.0;
    expect_reject(rows);

    rows = small_rows();
    rows.firms.push_back({"f1", "Engines & Parts", 100.0, 50.0}); // duplicate firm row
    expect_reject(rows);

    rows = small_rows();
    rows.firms.push_back({"f1", "Electrical Parts", 200.0, 50.0}); // conflicting size
    expect_reject(rows);

    rows = small_rows();
    rows.firms.push_back({"f9", "Unknown Segment", 1.0, 1.0});
    rows.affiliation.push_back({"f9", "USA"});
    expect_reject(rows);
}

TEST_CASE("lenient ingest drops dirty rows and records warnings", "[ingest]")
{
    DatasetRows rows = small_rows();
    rows.trade.push_back({"USA", "USA", "71321", 5.0});
    rows.ownership.push_back({"f1", "f9"});

    IngestOptions opt;
    opt.lenient = true;
    const Dataset ds = build_dataset(rows, default_segment_config(), opt);
    CHECK(ds.net.trade.edge_count() == 4);
    CHECK_FALSE(ds.net.ownership.contains("f9"));
    CHECK(ds.warnings.size() == 2);

    // a non-positive value is corrupt under any policy
    rows = small_rows();
    rows.trade.push_back({"USA", "DEU", "76211", -3.0});
    CHECK_THROWS_AS(build_dataset(rows, default_segment_config(), opt), validation_error);
}

TEST_CASE("minimum trade value prunes weak flows", "[ingest]")
{
    IngestOptions opt;
    opt.min_trade_value = 50.0;
    const Dataset ds = build_dataset(small_rows(), default_segment_config(), opt);
    const std::size_t usa = ds.net.trade.index_of("USA");
    const std::size_t jpn = ds.net.trade.index_of("JPN");
    const std::size_t deu = ds.net.trade.index_of("DEU");
    CHECK(ds.net.trade.has_edge(usa, deu));
    CHECK_FALSE(ds.net.trade.has_edge(usa, jpn)); // 40 < 50
    CHECK_FALSE(ds.net.trade.has_edge(jpn, deu)); // 15 < 50
    REQUIRE(ds.warnings.size() == 1);
    CHECK(ds.warnings[0].find("2 rows") != std::string::npos);
}

TEST_CASE("countries without trade still enter via affiliation", "[ingest]")
{
    DatasetRows rows = small_rows();
    rows.affiliation.push_back({"f5", "KOR"});
    rows.firms.push_back({"f5", "Engines & Parts", 10.0, 5.0});
    rows.attributes.push_back({"KOR", 800.0, 30.0, 1.0, 290.0});
    for (const std::string& other : {"USA", "DEU", "JPN"})
        rows.dyads.push_back({"KOR", other, 5000.0, 0, 0});
    const Dataset ds = build_dataset(rows, default_segment_config(), {});
    CHECK(ds.net.trade.contains("KOR"));
    CHECK(ds.net.trade.out_degree(ds.net.trade.index_of("KOR")) == 0);
    CHECK(ds.attributes.firm_count_total.at("KOR") == 1);
}

TEST_CASE("dataset csv round trip preserves every layer", "[ingest]")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "iftnet_ingest_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const SegmentConfig cfg = default_segment_config();
    const Dataset ds = build_dataset(small_rows(), cfg, {});
    const DatasetPaths paths = write_dataset(ds, dir.string(), "build", "deadbeef");
    const Dataset back = load_dataset(paths, cfg, {});

    CHECK(back.net == ds.net);
    CHECK(back.attributes == ds.attributes);
    CHECK(back.dyads.values == ds.dyads.values);
    fs::remove_all(dir);
}

TEST_CASE("csv readers reject unknown headers", "[ingest]")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "iftnet_bad_header";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path p = dir / "trade.csv";
    {
        std::ofstream out(p);
        out << "from,to,code,value\nUSA,DEU,71321,5\n";
    }
    CHECK_THROWS_WITH(read_trade_csv(p.string()), Catch::Matchers::ContainsSubstring("bad header"));
    fs::remove_all(dir);
}
