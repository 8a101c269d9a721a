#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iftnet/motif.hpp"
#include "iftnet/multilevel.hpp"

namespace iftnet {

struct Range {
    double lo = 0.0, hi = 1.0;

    double draw(Rng& rng) const { return rng.uniform(lo, hi); }

    void validate(const std::string& what) const
    {
        if (!(lo <= hi))
            throw validation_error("SynthSpec: empty range for " + what);
    }
};

// Stand-in for the real trade/ownership registries: a random multilevel
// instance with known properties, optionally carrying planted motif
// configurations that detection must find.
struct SynthSpec {
    std::size_t n_countries = 10;
    std::map<std::string, std::size_t> firms_per_segment; // defaults to 8 per segment
    SegmentConfig config = default_segment_config();
    double ownership_prob = 0.05;  // per unordered firm pair
    std::vector<double> affiliation_multiplicity = {0.7, 0.2, 0.1}; // weight on 1, 2, ... countries
    double multi_segment_prob = 0.1;
    double trade_density = 0.05; // per ordered country pair and product code
    Range trade_value{1.0, 1000.0};
    std::size_t planted_motifs = 0;
    std::string planted_segment; // first configured segment when empty
    Range gdp{50.0, 2000.0};
    Range gdp_per_capita{1.0, 60.0};
    Range rule_of_law{-2.0, 2.0};
    Range contract_days{100.0, 900.0};
    Range distance{100.0, 20000.0};
    double common_language_prob = 0.25;
    double shared_border_prob = 0.15;
    Range revenue{10.0, 5000.0};
    Range employees{10.0, 20000.0};
    double missing_size_prob = 0.1; // blank revenue/employees fields
    std::uint64_t seed = 1;

    void validate() const
    {
        if (n_countries < 2 || n_countries > 26 * 26 * 26)
            throw validation_error("SynthSpec: n_countries out of range");
        auto prob = [](double p, const char* what) {
            if (p < 0.0 || p > 1.0)
                throw validation_error(std::string("SynthSpec: ") + what +
                                       " outside [0, 1]");
        };
        prob(ownership_prob, "ownership_prob");
        prob(multi_segment_prob, "multi_segment_prob");
        prob(trade_density, "trade_density");
        prob(common_language_prob, "common_language_prob");
        prob(shared_border_prob, "shared_border_prob");
        prob(missing_size_prob, "missing_size_prob");
        if (affiliation_multiplicity.empty())
            throw validation_error("SynthSpec: affiliation_multiplicity empty");
        double total = 0.0;
        for (double w : affiliation_multiplicity) {
            if (w < 0.0)
                throw validation_error("SynthSpec: negative affiliation weight");
            total += w;
        }
        if (total <= 0.0)
            throw validation_error("SynthSpec: affiliation weights sum to zero");
        for (const auto& [seg, cnt] : firms_per_segment) {
            if (!config.has_segment(seg))
                throw validation_error("SynthSpec: unknown segment '" + seg + "'");
            (void)cnt;
        }
        if (!planted_segment.empty() && !config.has_segment(planted_segment))
            throw validation_error("SynthSpec: unknown planted segment '" + planted_segment +
                                   "'");
        trade_value.validate("trade_value");
        gdp.validate("gdp");
        gdp_per_capita.validate("gdp_per_capita");
        rule_of_law.validate("rule_of_law");
        contract_days.validate("contract_days");
        distance.validate("distance");
        revenue.validate("revenue");
        employees.validate("employees");
        if (trade_value.lo <= 0.0)
            throw validation_error("SynthSpec: trade values must be positive");
    }
};

struct SynthResult {
    Dataset dataset;
    std::vector<Motif> planted;
    SegmentMode planted_mode; // the mode under which the planted motifs qualify
};

namespace detail {

inline std::string country_code(std::size_t i)
{
    std::string s = "AAA";
    s[2] = static_cast<char>('A' + i % 26);
    s[1] = static_cast<char>('A' + (i / 26) % 26);
    s[0] = static_cast<char>('A' + (i / 676) % 26);
    return s;
}

inline std::string firm_code(std::size_t i)
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "F%04zu", i + 1);
    return std::string(buf);
}

inline std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights)
{
    double total = 0.0;
    for (double w : weights)
        total += w;
    double x = rng.uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        x -= weights[i];
        if (x < 0.0)
            return i;
    }
    return weights.size() - 1;
}

} // namespace detail

inline SynthResult generate_synthetic(const SynthSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);

    std::vector<std::string> countries;
    countries.reserve(spec.n_countries);
    for (std::size_t i = 0; i < spec.n_countries; ++i)
        countries.push_back(detail::country_code(i));

    const std::vector<std::string> segments = spec.config.segment_names();
    std::map<std::string, std::size_t> per_segment = spec.firms_per_segment;
    if (per_segment.empty())
        for (const auto& s : segments)
            per_segment[s] = 8;

    DatasetRows rows;
    std::vector<std::string> firms;
    std::map<std::string, std::set<std::string>> firm_countries;

    // firms, their segments and sizes
    for (const auto& [segment, count] : per_segment) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string id = detail::firm_code(firms.size());
            firms.push_back(id);
            std::set<std::string> segs{segment};
            if (segments.size() > 1 && rng.bernoulli(spec.multi_segment_prob)) {
                std::size_t other = rng.index(segments.size() - 1);
                std::size_t self =
                    static_cast<std::size_t>(std::find(segments.begin(), segments.end(),
                                                       segment) -
                                             segments.begin());
                if (other >= self)
                    ++other;
                segs.insert(segments[other]);
            }
            std::optional<double> rev, emp;
            if (!rng.bernoulli(spec.missing_size_prob))
                rev = spec.revenue.draw(rng);
            if (!rng.bernoulli(spec.missing_size_prob))
                emp = std::floor(spec.employees.draw(rng));
            for (const auto& s : segs)
                rows.firms.push_back({id, s, rev, emp});
        }
    }

    // affiliations: each firm operates in >= 1 distinct countries
    for (const auto& id : firms) {
        std::size_t want = detail::draw_weighted(rng, spec.affiliation_multiplicity) + 1;
        want = std::min(want, spec.n_countries);
        std::set<std::string> chosen;
        while (chosen.size() < want)
            chosen.insert(countries[rng.index(spec.n_countries)]);
        firm_countries[id] = chosen;
        for (const auto& c : chosen)
            rows.affiliation.push_back({id, c});
    }

    // ownership ties
    for (std::size_t i = 0; i < firms.size(); ++i) {
        for (std::size_t j = i + 1; j < firms.size(); ++j) {
            if (!rng.bernoulli(spec.ownership_prob))
                continue;
            if (rng.bernoulli(0.5))
                rows.ownership.push_back({firms[i], firms[j]});
            else
                rows.ownership.push_back({firms[j], firms[i]});
        }
    }

    // trade layer
    std::set<std::tuple<std::string, std::string, std::string>> trade_seen;
    const std::set<std::string> all_codes = spec.config.all_codes();
    for (const auto& a : countries) {
        for (const auto& b : countries) {
            if (a == b)
                continue;
            for (const auto& code : all_codes) {
                if (!rng.bernoulli(spec.trade_density))
                    continue;
                trade_seen.insert({a, b, code});
                rows.trade.push_back({a, b, code, spec.trade_value.draw(rng)});
            }
        }
    }

    // planted configurations: fresh firms with a single affiliation each, so
    // the exclusion rule cannot fire on them
    const std::string planted_segment =
        spec.planted_segment.empty() ? segments.front() : spec.planted_segment;
    const std::set<std::string>& planted_codes = spec.config.codes(planted_segment);
    struct Plant {
        std::string a, b, f, g, code;
    };
    std::vector<Plant> plants;
    for (std::size_t p = 0; p < spec.planted_motifs; ++p) {
        const std::size_t ai = rng.index(spec.n_countries);
        std::size_t bi = rng.index(spec.n_countries - 1);
        if (bi >= ai)
            ++bi;
        const std::string& a = countries[ai];
        const std::string& b = countries[bi];
        const std::string f = detail::firm_code(firms.size());
        firms.push_back(f);
        const std::string g = detail::firm_code(firms.size());
        firms.push_back(g);
        rows.firms.push_back({f, planted_segment, spec.revenue.draw(rng),
                              std::floor(spec.employees.draw(rng))});
        rows.firms.push_back({g, planted_segment, spec.revenue.draw(rng),
                              std::floor(spec.employees.draw(rng))});
        rows.affiliation.push_back({f, a});
        rows.affiliation.push_back({g, b});
        firm_countries[f] = {a};
        firm_countries[g] = {b};
        rows.ownership.push_back({f, g});
        std::vector<std::string> code_pool(planted_codes.begin(), planted_codes.end());
        const std::string code = code_pool[rng.index(code_pool.size())];
        if (trade_seen.insert({a, b, code}).second)
            rows.trade.push_back({a, b, code, spec.trade_value.draw(rng)});
        plants.push_back({a, b, f, g, code});
    }

    // attributes and dyadic covariates for every country that made it into
    // the trade or affiliation layers (the ingest universe)
    std::set<std::string> universe;
    for (const auto& r : rows.trade) {
        universe.insert(r.exporter);
        universe.insert(r.importer);
    }
    for (const auto& r : rows.affiliation)
        universe.insert(r.country);
    for (const auto& c : countries) {
        if (!universe.count(c))
            continue;
        rows.attributes.push_back({c, spec.gdp.draw(rng), spec.gdp_per_capita.draw(rng),
                                   spec.rule_of_law.draw(rng), spec.contract_days.draw(rng)});
    }
    for (std::size_t i = 0; i < countries.size(); ++i) {
        for (std::size_t j = i + 1; j < countries.size(); ++j) {
            if (!universe.count(countries[i]) || !universe.count(countries[j]))
                continue;
            rows.dyads.push_back({countries[i], countries[j], spec.distance.draw(rng),
                                  rng.bernoulli(spec.common_language_prob) ? 1 : 0,
                                  rng.bernoulli(spec.shared_border_prob) ? 1 : 0});
        }
    }

    SynthResult out;
    out.dataset = build_dataset(rows, spec.config);
    out.planted_mode = SegmentMode::intra_segment(planted_segment);

    // direction is a property of the finished trade layer, read off at the end
    std::set<Motif> planted;
    for (const auto& p : plants) {
        const std::size_t ai = out.dataset.net.trade.index_of(p.a);
        const std::size_t bi = out.dataset.net.trade.index_of(p.b);
        const bool ab = out.dataset.net.has_trade(ai, bi, p.code);
        const bool ba = out.dataset.net.has_trade(bi, ai, p.code);
        Motif m;
        if (p.a < p.b)
            m = {p.a, p.b, p.f, p.g, p.code,
                 ab && ba ? TradeDirection::both
                          : (ab ? TradeDirection::a_to_b : TradeDirection::b_to_a)};
        else
            m = {p.b, p.a, p.g, p.f, p.code,
                 ab && ba ? TradeDirection::both
                          : (ba ? TradeDirection::a_to_b : TradeDirection::b_to_a)};
        planted.insert(m);
    }
    out.planted.assign(planted.begin(), planted.end());
    return out;
}

} // namespace iftnet
