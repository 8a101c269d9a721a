#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "iftnet/csv.hpp"
#include "iftnet/graph.hpp"
#include "iftnet/segments.hpp"

namespace iftnet {

// Raw file rows, kept verbatim so ingestion can be tested independently of
// parsing and so the synthetic generator can reuse the same builder.
struct TradeRow {
    std::string exporter, importer, code;
    double value = 0.0;
};
struct OwnershipRow {
    std::string parent, child;
};
struct AffiliationRow {
    std::string firm, country;
};
struct FirmRow {
    std::string firm, segment;
    std::optional<double> revenue, employees;
};
struct AttributeRow {
    std::string iso3;
    double gdp = 0.0, gdp_per_capita = 0.0, rule_of_law = 0.0, contract_days = 0.0;
};
struct DyadRow {
    std::string a, b;
    double distance = 0.0;
    int common_language = 0, shared_border = 0;
};

struct DatasetRows {
    std::vector<TradeRow> trade;
    std::vector<OwnershipRow> ownership;
    std::vector<AffiliationRow> affiliation;
    std::vector<FirmRow> firms;
    std::vector<AttributeRow> attributes;
    std::vector<DyadRow> dyads;
};

struct FirmSize {
    std::optional<double> revenue;
    std::optional<double> employees;

    bool operator==(const FirmSize&) const = default;
};

// The three-layer structure: countries linked by trade at the macro level,
// firms linked by ownership at the micro level, and the firm-country
// affiliation network joining them. Ownership direction (parent -> child)
// is preserved in storage; motif detection consumes it undirected.
struct MultilevelNetwork {
    Graph trade;      // directed, countries; union over all product codes
    Graph ownership;  // directed, firms
    BipartiteGraph affiliation;
    SegmentConfig config;
    std::map<std::string, Graph> trade_by_code; // directed country graph per product code
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>>
        trade_values; // (exporter, importer) -> code -> value
    std::map<std::string, std::set<std::string>> firm_segments;
    std::map<std::string, FirmSize> firm_size;

    const std::vector<std::string>& countries() const { return trade.node_ids(); }
    const std::vector<std::string>& firms() const { return ownership.node_ids(); }

    bool has_trade(std::size_t exporter, std::size_t importer, const std::string& code) const
    {
        auto it = trade_by_code.find(code);
        return it != trade_by_code.end() && it->second.has_edge(exporter, importer);
    }

    bool operator==(const MultilevelNetwork& o) const
    {
        return trade == o.trade && ownership == o.ownership && affiliation == o.affiliation &&
               trade_values == o.trade_values && firm_segments == o.firm_segments &&
               firm_size == o.firm_size;
    }
};

struct CountryAttributes {
    struct Values {
        double gdp = 0.0, gdp_per_capita = 0.0, rule_of_law = 0.0, contract_days = 0.0;
        bool operator==(const Values&) const = default;
    };
    std::map<std::string, Values> values;
    // derived from the affiliation layer, never ingested
    std::map<std::string, std::map<std::string, std::size_t>> firm_count; // iso3 -> segment -> n
    std::map<std::string, std::size_t> firm_count_total;                  // distinct over segments

    bool has(const std::string& iso3) const { return values.count(iso3) > 0; }

    bool operator==(const CountryAttributes& o) const
    {
        return values == o.values && firm_count == o.firm_count &&
               firm_count_total == o.firm_count_total;
    }

    // Bound covariate vector for a model node set. firm_count resolves per
    // segment in intra mode and to the distinct all-segment count in inter
    // mode (empty segment name). Missing values are a hard error.
    std::vector<double> attribute_vector(const std::string& name,
                                         const std::vector<std::string>& node_ids,
                                         bool log_transform = false,
                                         const std::string& firm_count_segment = "") const
    {
        std::vector<double> out;
        out.reserve(node_ids.size());
        for (const auto& id : node_ids) {
            if (name == "firm_count") {
                if (firm_count_segment.empty()) {
                    auto it = firm_count_total.find(id);
                    out.push_back(it == firm_count_total.end()
                                      ? 0.0
                                      : static_cast<double>(it->second));
                } else {
                    auto it = firm_count.find(id);
                    double v = 0.0;
                    if (it != firm_count.end()) {
                        auto jt = it->second.find(firm_count_segment);
                        if (jt != it->second.end())
                            v = static_cast<double>(jt->second);
                    }
                    out.push_back(v);
                }
                continue;
            }
            auto it = values.find(id);
            if (it == values.end())
                throw validation_error("country '" + id + "' has no attribute data (required by '" +
                                       name + "')");
            double v;
            if (name == "gdp")
                v = it->second.gdp;
            else if (name == "gdp_per_capita")
                v = it->second.gdp_per_capita;
            else if (name == "rule_of_law")
                v = it->second.rule_of_law;
            else if (name == "contract_days")
                v = it->second.contract_days;
            else
                throw validation_error("unknown node attribute '" + name + "'");
            if (log_transform && (name == "gdp" || name == "gdp_per_capita")) {
                if (!(v > 0.0))
                    throw validation_error("log transform of non-positive " + name + " for '" +
                                           id + "'");
                v = std::log(v);
            }
            out.push_back(v);
        }
        return out;
    }
};

struct DyadCovariates {
    struct Values {
        double distance = 0.0;
        int common_language = 0, shared_border = 0;
        bool operator==(const Values&) const = default;
    };
    // keyed by (min, max) country pair
    std::map<std::pair<std::string, std::string>, Values> values;

    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b)
    {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    bool operator==(const DyadCovariates&) const = default;

    // n*n row-major symmetric matrix for a model node set; a missing pair is
    // a hard error (silent zero-fill would corrupt the covariate)
    std::vector<double> matrix(const std::string& name,
                               const std::vector<std::string>& node_ids) const
    {
        const std::size_t n = node_ids.size();
        std::vector<double> m(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto it = values.find(key(node_ids[i], node_ids[j]));
                if (it == values.end())
                    throw validation_error("no dyad covariate row for pair (" + node_ids[i] +
                                           ", " + node_ids[j] + ")");
                double v;
                if (name == "distance")
                    v = it->second.distance;
                else if (name == "common_language")
                    v = static_cast<double>(it->second.common_language);
                else if (name == "shared_border")
                    v = static_cast<double>(it->second.shared_border);
                else
                    throw validation_error("unknown dyad covariate '" + name + "'");
                m[i * n + j] = m[j * n + i] = v;
            }
        }
        return m;
    }
};

struct IngestOptions {
    double min_trade_value = 0.0; // flows below this are dropped (0 keeps any positive flow)
    bool lenient = false;         // drop-and-warn instead of hard error for dirty rows
};

struct Dataset {
    MultilevelNetwork net;
    CountryAttributes attributes;
    DyadCovariates dyads;
    std::vector<std::string> warnings;

    bool operator==(const Dataset& o) const
    {
        return net == o.net && attributes == o.attributes && dyads == o.dyads;
    }
};

namespace detail {

inline bool valid_iso3(const std::string& s)
{
    if (s.size() != 3)
        return false;
    for (char c : s)
        if (c < 'A' || c > 'Z')
            return false;
    return true;
}

inline bool valid_firm_id(const std::string& s)
{
    if (s.empty())
        return false;
    for (char c : s) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok)
            return false;
    }
    return true;
}

inline void require_iso3(const std::string& s, const std::string& context)
{
    if (!valid_iso3(s))
        throw validation_error(context + ": unknown country code '" + s + "'");
}

} // namespace detail

// Assemble and validate a dataset from rows. Shared by the file loader and
// the synthetic generator, which makes round-trips exact by construction.
inline Dataset build_dataset(const DatasetRows& rows, const SegmentConfig& config,
                             const IngestOptions& options = {})
{
    Dataset ds;
    auto warn = [&](const std::string& msg) { ds.warnings.push_back(msg); };

    // pass 1: node universes
    std::set<std::string> country_set;
    std::set<std::string> firm_set; // firms with an affiliation row
    for (const auto& r : rows.trade) {
        detail::require_iso3(r.exporter, "trade");
        detail::require_iso3(r.importer, "trade");
        country_set.insert(r.exporter);
        country_set.insert(r.importer);
    }
    for (const auto& r : rows.affiliation) {
        detail::require_iso3(r.country, "affiliation");
        if (!detail::valid_firm_id(r.firm))
            throw validation_error("affiliation: bad firm id '" + r.firm + "'");
        country_set.insert(r.country);
        firm_set.insert(r.firm);
    }

    auto known_firm = [&](const std::string& id, const std::string& context) -> bool {
        if (firm_set.count(id))
            return true;
        if (options.lenient) {
            warn(context + ": dropping row with dangling firm id '" + id + "'");
            return false;
        }
        throw validation_error(context + ": dangling firm id '" + id +
                               "' (no affiliation row)");
    };
    auto known_country = [&](const std::string& id, const std::string& context) -> bool {
        detail::require_iso3(id, context);
        if (country_set.count(id))
            return true;
        if (options.lenient) {
            warn(context + ": dropping row for country '" + id +
                 "' absent from trade and affiliation layers");
            return false;
        }
        throw validation_error(context + ": unknown country code '" + id +
                               "' (absent from trade and affiliation layers)");
    };

    std::vector<std::string> countries(country_set.begin(), country_set.end());
    std::vector<std::string> firms(firm_set.begin(), firm_set.end());

    ds.net.trade = Graph(EdgeMode::directed, countries);
    ds.net.ownership = Graph(EdgeMode::directed, firms);
    ds.net.affiliation = BipartiteGraph(firms, countries);
    ds.net.config = config;

    // trade layer
    std::size_t below_threshold = 0;
    for (const auto& r : rows.trade) {
        if (r.exporter == r.importer) {
            if (options.lenient) {
                warn("trade: dropping self-loop row for '" + r.exporter + "'");
                continue;
            }
            throw validation_error("trade: self-loop for country '" + r.exporter + "'");
        }
        if (!(r.value > 0.0))
            throw validation_error("trade: non-positive value " + format_double(r.value) +
                                   " on " + r.exporter + "->" + r.importer + " (" + r.code + ")");
        if (!config.segment_of(r.code))
            throw validation_error("trade: product code '" + r.code +
                                   "' not in any configured segment");
        if (r.value < options.min_trade_value) {
            ++below_threshold;
            continue;
        }
        auto& by_code = ds.net.trade_values[{r.exporter, r.importer}];
        if (!by_code.emplace(r.code, r.value).second)
            throw validation_error("trade: duplicate row " + r.exporter + "->" + r.importer +
                                   " (" + r.code + ")");
        const std::size_t e = ds.net.trade.index_of(r.exporter);
        const std::size_t m = ds.net.trade.index_of(r.importer);
        ds.net.trade.set_edge(e, m, true);
        auto it = ds.net.trade_by_code.find(r.code);
        if (it == ds.net.trade_by_code.end())
            it = ds.net.trade_by_code.emplace(r.code, Graph(EdgeMode::directed, countries)).first;
        it->second.set_edge(e, m, true);
    }
    if (below_threshold > 0)
        warn("trade: dropped " + std::to_string(below_threshold) + " rows below min value " +
             format_double(options.min_trade_value));

    // affiliation layer
    std::set<std::pair<std::string, std::string>> seen_affiliations;
    for (const auto& r : rows.affiliation) {
        if (!seen_affiliations.emplace(r.firm, r.country).second)
            throw validation_error("affiliation: duplicate row " + r.firm + "," + r.country);
        ds.net.affiliation.add_edge(ds.net.affiliation.left_index(r.firm),
                                    ds.net.affiliation.right_index(r.country));
    }

    // ownership layer
    std::set<std::pair<std::string, std::string>> seen_ownership;
    for (const auto& r : rows.ownership) {
        if (r.parent == r.child) {
            if (options.lenient) {
                warn("ownership: dropping self-loop for firm '" + r.parent + "'");
                continue;
            }
            throw validation_error("ownership: self-loop for firm '" + r.parent + "'");
        }
        if (!known_firm(r.parent, "ownership") || !known_firm(r.child, "ownership"))
            continue;
        if (!seen_ownership.emplace(r.parent, r.child).second)
            throw validation_error("ownership: duplicate row " + r.parent + "," + r.child);
        ds.net.ownership.set_edge(ds.net.ownership.index_of(r.parent),
                                  ds.net.ownership.index_of(r.child), true);
    }

    // firm segments and sizes
    std::set<std::pair<std::string, std::string>> seen_firm_rows;
    for (const auto& r : rows.firms) {
        if (!config.has_segment(r.segment))
            throw validation_error("firms: unknown segment '" + r.segment + "' for firm '" +
                                   r.firm + "'");
        if (!known_firm(r.firm, "firms"))
            continue;
        if (!seen_firm_rows.emplace(r.firm, r.segment).second)
            throw validation_error("firms: duplicate row " + r.firm + "," + r.segment);
        ds.net.firm_segments[r.firm].insert(r.segment);
        if (r.employees && *r.employees < 0.0)
            throw validation_error("firms: negative employee count for '" + r.firm + "'");
        auto [it, inserted] = ds.net.firm_size.emplace(r.firm, FirmSize{r.revenue, r.employees});
        if (!inserted) {
            auto merge = [&](std::optional<double>& slot, const std::optional<double>& v,
                             const char* what) {
                if (!v)
                    return;
                if (slot && *slot != *v)
                    throw validation_error("firms: conflicting " + std::string(what) +
                                           " for firm '" + r.firm + "'");
                slot = v;
            };
            merge(it->second.revenue, r.revenue, "operating_revenue");
            merge(it->second.employees, r.employees, "employees");
        }
    }

    // country attributes
    for (const auto& r : rows.attributes) {
        if (!known_country(r.iso3, "attributes"))
            continue;
        if (r.contract_days < 0.0)
            throw validation_error("attributes: negative contract_days for '" + r.iso3 + "'");
        CountryAttributes::Values v{r.gdp, r.gdp_per_capita, r.rule_of_law, r.contract_days};
        if (!ds.attributes.values.emplace(r.iso3, v).second)
            throw validation_error("attributes: duplicate row for '" + r.iso3 + "'");
    }

    // dyadic covariates
    for (const auto& r : rows.dyads) {
        if (r.a == r.b)
            throw validation_error("dyads: self-pair for country '" + r.a + "'");
        if (!known_country(r.a, "dyads") || !known_country(r.b, "dyads"))
            continue;
        if (r.distance < 0.0)
            throw validation_error("dyads: negative distance for (" + r.a + ", " + r.b + ")");
        auto flag_ok = [](int f) { return f == 0 || f == 1; };
        if (!flag_ok(r.common_language) || !flag_ok(r.shared_border))
            throw validation_error("dyads: flags must be 0 or 1 for (" + r.a + ", " + r.b + ")");
        DyadCovariates::Values v{r.distance, r.common_language, r.shared_border};
        auto key = DyadCovariates::key(r.a, r.b);
        auto [it, inserted] = ds.dyads.values.emplace(key, v);
        if (!inserted && !(it->second == v))
            throw validation_error("dyads: inconsistent duplicate for (" + key.first + ", " +
                                   key.second + ")");
    }

    // derived investment covariate: firms per segment operating in a country
    for (std::size_t c = 0; c < ds.net.affiliation.right_count(); ++c) {
        const std::string& iso3 = ds.net.affiliation.right_ids()[c];
        std::set<std::string> distinct;
        for (std::size_t f : ds.net.affiliation.right_neighbors(c)) {
            const std::string& firm = ds.net.affiliation.left_ids()[f];
            auto it = ds.net.firm_segments.find(firm);
            if (it == ds.net.firm_segments.end())
                continue;
            for (const auto& seg : it->second)
                ++ds.attributes.firm_count[iso3][seg];
            distinct.insert(firm);
        }
        ds.attributes.firm_count_total[iso3] = distinct.size();
    }

    return ds;
}

// --- file parsing ----------------------------------------------------------

inline std::vector<TradeRow> read_trade_csv(const std::string& path)
{
    std::vector<TradeRow> rows;
    for (const auto& r : read_csv(path, {"reporter_iso3", "partner_iso3", "product_code", "value"})) {
        const std::string ctx = path + ":" + std::to_string(r.line_number);
        rows.push_back({r.fields[0], r.fields[1], r.fields[2], parse_double(r.fields[3], ctx)});
    }
    return rows;
}

inline std::vector<OwnershipRow> read_ownership_csv(const std::string& path)
{
    std::vector<OwnershipRow> rows;
    for (const auto& r : read_csv(path, {"parent_firm_id", "child_firm_id"}))
        rows.push_back({r.fields[0], r.fields[1]});
    return rows;
}

inline std::vector<AffiliationRow> read_affiliation_csv(const std::string& path)
{
    std::vector<AffiliationRow> rows;
    for (const auto& r : read_csv(path, {"firm_id", "country_iso3"}))
        rows.push_back({r.fields[0], r.fields[1]});
    return rows;
}

inline std::vector<FirmRow> read_firms_csv(const std::string& path)
{
    std::vector<FirmRow> rows;
    for (const auto& r : read_csv(path, {"firm_id", "segment", "operating_revenue", "employees"})) {
        const std::string ctx = path + ":" + std::to_string(r.line_number);
        FirmRow row{r.fields[0], r.fields[1], std::nullopt, std::nullopt};
        if (!r.fields[2].empty())
            row.revenue = parse_double(r.fields[2], ctx);
        if (!r.fields[3].empty())
            row.employees = parse_double(r.fields[3], ctx);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<AttributeRow> read_attributes_csv(const std::string& path)
{
    std::vector<AttributeRow> rows;
    for (const auto& r :
         read_csv(path, {"iso3", "gdp", "gdp_per_capita", "rule_of_law", "contract_days"})) {
        const std::string ctx = path + ":" + std::to_string(r.line_number);
        rows.push_back({r.fields[0], parse_double(r.fields[1], ctx),
                        parse_double(r.fields[2], ctx), parse_double(r.fields[3], ctx),
                        parse_double(r.fields[4], ctx)});
    }
    return rows;
}

inline std::vector<DyadRow> read_dyads_csv(const std::string& path)
{
    std::vector<DyadRow> rows;
    for (const auto& r : read_csv(
             path, {"iso3_a", "iso3_b", "distance_km", "common_language", "shared_border"})) {
        const std::string ctx = path + ":" + std::to_string(r.line_number);
        rows.push_back({r.fields[0], r.fields[1], parse_double(r.fields[2], ctx),
                        static_cast<int>(parse_int(r.fields[3], ctx)),
                        static_cast<int>(parse_int(r.fields[4], ctx))});
    }
    return rows;
}

struct DatasetPaths {
    std::string trade, ownership, affiliation, firms, attributes, dyads;
};

inline DatasetRows read_dataset_rows(const DatasetPaths& paths)
{
    DatasetRows rows;
    rows.trade = read_trade_csv(paths.trade);
    rows.ownership = read_ownership_csv(paths.ownership);
    rows.affiliation = read_affiliation_csv(paths.affiliation);
    rows.firms = read_firms_csv(paths.firms);
    rows.attributes = read_attributes_csv(paths.attributes);
    rows.dyads = read_dyads_csv(paths.dyads);
    return rows;
}

inline Dataset load_dataset(const DatasetPaths& paths, const SegmentConfig& config,
                            const IngestOptions& options = {})
{
    return build_dataset(read_dataset_rows(paths), config, options);
}

// --- serialization ---------------------------------------------------------

// Writes the six input-format CSVs in canonical sorted order.
inline DatasetPaths write_dataset(const Dataset& ds, const std::string& dir,
                                  const std::string& stage = "",
                                  const std::string& config_hash = "")
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    DatasetPaths paths{dir + "/trade.csv",      dir + "/ownership.csv",
                       dir + "/affiliation.csv", dir + "/firms.csv",
                       dir + "/attributes.csv",  dir + "/dyads.csv"};
    auto open = [&](const std::string& path, const std::string& header) {
        CsvWriter w(path);
        if (!stage.empty())
            w.stage_comment(stage, config_hash);
        w.raw_line(header);
        return w;
    };

    {
        auto w = open(paths.trade, "reporter_iso3,partner_iso3,product_code,value");
        for (const auto& [pair, by_code] : ds.net.trade_values)
            for (const auto& [code, value] : by_code)
                w.row({pair.first, pair.second, code, format_double(value)});
        w.close();
    }
    {
        auto w = open(paths.ownership, "parent_firm_id,child_firm_id");
        for (const auto& [p, c] : ds.net.ownership.edges())
            w.row({ds.net.ownership.id_of(p), ds.net.ownership.id_of(c)});
        w.close();
    }
    {
        auto w = open(paths.affiliation, "firm_id,country_iso3");
        for (std::size_t f = 0; f < ds.net.affiliation.left_count(); ++f)
            for (std::size_t c : ds.net.affiliation.left_neighbors(f))
                w.row({ds.net.affiliation.left_ids()[f], ds.net.affiliation.right_ids()[c]});
        w.close();
    }
    {
        auto w = open(paths.firms, "firm_id,segment,operating_revenue,employees");
        for (const auto& [firm, segments] : ds.net.firm_segments) {
            auto size_it = ds.net.firm_size.find(firm);
            std::string rev, emp;
            if (size_it != ds.net.firm_size.end()) {
                if (size_it->second.revenue)
                    rev = format_double(*size_it->second.revenue);
                if (size_it->second.employees)
                    emp = format_double(*size_it->second.employees);
            }
            for (const auto& seg : segments)
                w.row({firm, seg, rev, emp});
        }
        w.close();
    }
    {
        auto w = open(paths.attributes, "iso3,gdp,gdp_per_capita,rule_of_law,contract_days");
        for (const auto& [iso3, v] : ds.attributes.values)
            w.row({iso3, format_double(v.gdp), format_double(v.gdp_per_capita),
                   format_double(v.rule_of_law), format_double(v.contract_days)});
        w.close();
    }
    {
        auto w = open(paths.dyads, "iso3_a,iso3_b,distance_km,common_language,shared_border");
        for (const auto& [pair, v] : ds.dyads.values)
            w.row({pair.first, pair.second, format_double(v.distance),
                   std::to_string(v.common_language), std::to_string(v.shared_border)});
        w.close();
    }
    return paths;
}

} // namespace iftnet
