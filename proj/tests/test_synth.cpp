#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>

#include "iftnet/motif.hpp"
#include "iftnet/synth.hpp"

using namespace iftnet;

TEST_CASE("country and firm codes are well formed", "[synth]")
{
    CHECK(detail::country_code(0) == "AAA");
    CHECK(detail::country_code(1) == "AAB");
    CHECK(detail::country_code(26) == "ABA");
    CHECK(detail::firm_code(0) == "F0001");
    CHECK(detail::firm_code(41) == "F0042");
}

TEST_CASE("generation is deterministic per seed", "[synth]")
{
    SynthSpec spec;
    spec.seed = 33;
    spec.n_countries = 7;
    spec.planted_motifs = 2;
    const SynthResult a = generate_synthetic(spec);
    const SynthResult b = generate_synthetic(spec);
    CHECK(a.dataset.net == b.dataset.net);
    CHECK(a.dataset.attributes == b.dataset.attributes);
    CHECK(a.planted == b.planted);

    spec.seed = 34;
    const SynthResult c = generate_synthetic(spec);
    CHECK_FALSE(a.dataset.net == c.dataset.net);
}

TEST_CASE("the synthetic dataset passes strict ingestion invariants", "[synth]")
{
    SynthSpec spec;
    spec.seed = 5;
    spec.n_countries = 9;
    spec.trade_density = 0.15;
    spec.ownership_prob = 0.1;
    const SynthResult synth = generate_synthetic(spec);
    const MultilevelNetwork& net = synth.dataset.net;

    // attributes and dyads cover the country universe completely
    for (const auto& c : net.countries()) {
        CHECK(synth.dataset.attributes.has(c));
        CHECK(synth.dataset.attributes.firm_count_total.count(c) == 1);
    }
    CHECK_NOTHROW(synth.dataset.dyads.matrix("distance", net.countries()));

    // every firm has at least one affiliation and a segment
    for (const auto& f : net.firms()) {
        CHECK(net.affiliation.left_degree(net.affiliation.left_index(f)) >= 1);
        CHECK(net.firm_segments.count(f) == 1);
    }
}

TEST_CASE("planted motifs are always detected", "[synth]")
{
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        SynthSpec spec;
        spec.seed = seed;
        spec.n_countries = 8;
        spec.planted_motifs = 4;
        spec.planted_segment = "Engines & Parts";
        const SynthResult synth = generate_synthetic(spec);
        REQUIRE(synth.planted.size() == 4);
        CHECK(synth.planted_mode == SegmentMode::intra_segment("Engines & Parts"));

        const auto detected = detect_motifs(synth.dataset.net, synth.planted_mode);
        const std::set<Motif> pool(detected.begin(), detected.end());
        for (const auto& m : synth.planted) {
            CHECK(pool.count(m) == 1);
            CHECK_NOTHROW(validate_motif(synth.dataset.net, m, synth.planted_mode));
        }
    }
}

TEST_CASE("no ownership ties means no motifs", "[synth]")
{
    SynthSpec spec;
    spec.seed = 8;
    spec.ownership_prob = 0.0;
    spec.planted_motifs = 0;
    const SynthResult synth = generate_synthetic(spec);
    CHECK(synth.dataset.net.ownership.edge_count() == 0);
    CHECK(detect_motifs(synth.dataset.net, SegmentMode::inter()).empty());
    for (const auto& seg : synth.dataset.net.config.segment_names())
        CHECK(detect_motifs(synth.dataset.net, SegmentMode::intra_segment(seg)).empty());
}

TEST_CASE("synthetic data round-trips through the csv layer", "[synth]")
{
    namespace fs = std::filesystem;
    SynthSpec spec;
    spec.seed = 21;
    spec.n_countries = 6;
    spec.planted_motifs = 3;
    const SynthResult synth = generate_synthetic(spec);

    const fs::path dir = fs::temp_directory_path() / "iftnet_synth_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const DatasetPaths paths = write_dataset(synth.dataset, dir.string(), "synth", "f00d");
    const Dataset back = load_dataset(paths, spec.config, {});
    CHECK(back.net == synth.dataset.net);
    CHECK(back.attributes == synth.dataset.attributes);
    CHECK(back.dyads == synth.dataset.dyads);
    fs::remove_all(dir);
}

TEST_CASE("spec validation rejects nonsense", "[synth]")
{
    SynthSpec spec;
    spec.n_countries = 1;
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = SynthSpec{};
    spec.trade_density = 1.4;
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = SynthSpec{};
    spec.planted_segment = "Confectionery";
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = SynthSpec{};
    spec.firms_per_segment = {{"Confectionery", 3}};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
}
