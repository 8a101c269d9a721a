#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iftnet/multilevel.hpp"

namespace iftnet {

enum class TradeDirection { a_to_b, b_to_a, both };

inline std::string to_string(TradeDirection d)
{
    switch (d) {
    case TradeDirection::a_to_b: return "a_to_b";
    case TradeDirection::b_to_a: return "b_to_a";
    case TradeDirection::both: return "both";
    }
    throw error("unreachable trade direction");
}

inline TradeDirection trade_direction_from_string(const std::string& s)
{
    if (s == "a_to_b")
        return TradeDirection::a_to_b;
    if (s == "b_to_a")
        return TradeDirection::b_to_a;
    if (s == "both")
        return TradeDirection::both;
    throw validation_error("bad trade direction '" + s + "'");
}

// One instance of the target configuration: countries a and b trade a product,
// firm_f (affiliated with a) and firm_g (affiliated with b) are linked by
// ownership, and neither firm is affiliated with the opposite trading country.
// Canonical form has country_a < country_b, so firm roles are fixed by the
// country ordering.
struct Motif {
    std::string country_a, country_b;
    std::string firm_f, firm_g;
    std::string product_code;
    TradeDirection direction = TradeDirection::a_to_b;

    auto operator<=>(const Motif&) const = default;
};

struct SegmentMode {
    bool intra = true;
    std::string segment; // empty in inter mode

    static SegmentMode intra_segment(std::string name) { return {true, std::move(name)}; }
    static SegmentMode inter() { return {false, {}}; }

    std::string label() const { return intra ? "intra_" + segment : "inter"; }

    bool operator==(const SegmentMode&) const = default;
};

namespace detail {

inline bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b)
{
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& x : small)
        if (large.count(x))
            return false;
    return true;
}

} // namespace detail

inline std::vector<Motif> detect_motifs(const MultilevelNetwork& net, const SegmentMode& mode)
{
    if (mode.intra && !net.config.has_segment(mode.segment))
        throw validation_error("detect_motifs: unknown segment '" + mode.segment + "'");
    const std::set<std::string> codes =
        mode.intra ? net.config.codes(mode.segment) : net.config.all_codes();

    auto segments_of = [&](const std::string& firm) -> const std::set<std::string>* {
        auto it = net.firm_segments.find(firm);
        return it == net.firm_segments.end() ? nullptr : &it->second;
    };

    // Firm indices are shared between the ownership graph and the affiliation
    // left side, and country indices between the trade graph and the
    // affiliation right side; both pairs are built from the same sorted id
    // vectors at ingestion.
    std::set<Motif> found;
    const Graph own = net.ownership.undirected_copy();
    for (const auto& [fi, gi] : own.edges()) {
        const std::string& f = own.id_of(fi);
        const std::string& g = own.id_of(gi);
        const auto* fs = segments_of(f);
        const auto* gs = segments_of(g);
        if (!fs || !gs)
            continue;
        if (mode.intra) {
            if (!fs->count(mode.segment) || !gs->count(mode.segment))
                continue;
        } else {
            if (!detail::disjoint(*fs, *gs))
                continue;
        }
        for (std::size_t a : net.affiliation.left_neighbors(fi)) {
            for (std::size_t b : net.affiliation.left_neighbors(gi)) {
                if (a == b)
                    continue;
                // the excluded configuration: a firm affiliated with both
                // trading countries
                if (net.affiliation.has_edge(fi, b) || net.affiliation.has_edge(gi, a))
                    continue;
                for (const auto& code : codes) {
                    const bool ab = net.has_trade(a, b, code);
                    const bool ba = net.has_trade(b, a, code);
                    if (!ab && !ba)
                        continue;
                    const std::string& ca = net.trade.id_of(a);
                    const std::string& cb = net.trade.id_of(b);
                    Motif m;
                    if (ca < cb) {
                        m = {ca, cb, f, g, code,
                             ab && ba ? TradeDirection::both
                                      : (ab ? TradeDirection::a_to_b : TradeDirection::b_to_a)};
                    } else {
                        m = {cb, ca, g, f, code,
                             ab && ba ? TradeDirection::both
                                      : (ba ? TradeDirection::a_to_b : TradeDirection::b_to_a)};
                    }
                    found.insert(std::move(m));
                }
            }
        }
    }
    return {found.begin(), found.end()};
}

// Checks every Motif invariant against the instance, including the segment
// rule of the mode it was detected under.
inline void validate_motif(const MultilevelNetwork& net, const Motif& m, const SegmentMode& mode)
{
    auto fail = [&](const std::string& why) {
        throw validation_error("invalid motif (" + m.country_a + ", " + m.country_b + ", " +
                               m.firm_f + ", " + m.firm_g + ", " + m.product_code + "): " + why);
    };
    if (m.country_a == m.country_b)
        fail("countries coincide");
    if (m.firm_f == m.firm_g)
        fail("firms coincide");
    if (m.country_a > m.country_b)
        fail("countries not in canonical order");

    const std::size_t a = net.trade.index_of(m.country_a);
    const std::size_t b = net.trade.index_of(m.country_b);
    const std::size_t fi = net.ownership.index_of(m.firm_f);
    const std::size_t gi = net.ownership.index_of(m.firm_g);

    const bool ab = net.has_trade(a, b, m.product_code);
    const bool ba = net.has_trade(b, a, m.product_code);
    const TradeDirection actual = ab && ba ? TradeDirection::both
                                  : ab     ? TradeDirection::a_to_b
                                  : ba     ? TradeDirection::b_to_a
                                           : throw validation_error(
                                             "invalid motif: no trade edge for product code " +
                                             m.product_code);
    if (actual != m.direction)
        fail("recorded trade direction does not match the trade layer");

    if (!net.affiliation.has_edge(fi, a))
        fail("firm_f not affiliated with country_a");
    if (!net.affiliation.has_edge(gi, b))
        fail("firm_g not affiliated with country_b");
    if (net.affiliation.has_edge(fi, b))
        fail("firm_f affiliated with country_b (excluded configuration)");
    if (net.affiliation.has_edge(gi, a))
        fail("firm_g affiliated with country_a (excluded configuration)");
    if (!net.ownership.has_edge(fi, gi) && !net.ownership.has_edge(gi, fi))
        fail("no ownership tie between the firms");

    auto segs = [&](const std::string& firm) -> const std::set<std::string>& {
        auto it = net.firm_segments.find(firm);
        if (it == net.firm_segments.end())
            fail("firm '" + firm + "' has no segment");
        return it->second;
    };
    const auto& fs = segs(m.firm_f);
    const auto& gs = segs(m.firm_g);
    if (mode.intra) {
        if (!fs.count(mode.segment) || !gs.count(mode.segment))
            fail("firm outside segment '" + mode.segment + "'");
        if (!net.config.codes(mode.segment).count(m.product_code))
            fail("product code outside segment '" + mode.segment + "'");
    } else {
        if (!detail::disjoint(fs, gs))
            fail("firm segment sets overlap in inter mode");
        if (!net.config.segment_of(m.product_code))
            fail("product code not configured");
    }
}

struct FilteredTradeNetwork {
    Graph graph; // undirected, countries
    SegmentMode mode;
    std::map<std::pair<std::string, std::string>, std::vector<Motif>> provenance;
};

// One undirected edge per country pair with at least one supporting motif.
// extra_nodes joins the node set untouched, which is how isolates are kept
// when requested.
inline FilteredTradeNetwork build_filtered_network(const std::vector<Motif>& motifs,
                                                   const SegmentMode& mode,
                                                   const std::vector<std::string>& extra_nodes = {})
{
    FilteredTradeNetwork out;
    out.mode = mode;
    std::set<std::string> nodes(extra_nodes.begin(), extra_nodes.end());
    for (const auto& m : motifs) {
        nodes.insert(m.country_a);
        nodes.insert(m.country_b);
        out.provenance[{m.country_a, m.country_b}].push_back(m);
    }
    out.graph = Graph(EdgeMode::undirected, {nodes.begin(), nodes.end()});
    for (auto& [pair, list] : out.provenance) {
        std::sort(list.begin(), list.end());
        out.graph.add_edge(pair.first, pair.second);
    }
    return out;
}

// --- Table 1 style descriptives ---------------------------------------------

struct Moments {
    std::size_t n_values = 0; // non-missing
    std::optional<double> mean, sd;
};

struct FirmPopulationStats {
    std::size_t n_firms = 0;
    Moments revenue, employees;
};

struct FirmDescriptives {
    std::string segment;
    FirmPopulationStats all, connected;
};

namespace detail {

inline Moments moments_of(const std::vector<double>& xs)
{
    Moments m;
    m.n_values = xs.size();
    if (xs.empty())
        return m;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    m.mean = mean;
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - mean) * (x - mean);
        m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

inline FirmPopulationStats population_stats(const MultilevelNetwork& net,
                                            const std::vector<std::string>& firms)
{
    FirmPopulationStats s;
    s.n_firms = firms.size();
    std::vector<double> rev, emp;
    for (const auto& f : firms) {
        auto it = net.firm_size.find(f);
        if (it == net.firm_size.end())
            continue;
        if (it->second.revenue)
            rev.push_back(*it->second.revenue);
        if (it->second.employees)
            emp.push_back(*it->second.employees);
    }
    s.revenue = moments_of(rev);
    s.employees = moments_of(emp);
    return s;
}

} // namespace detail

inline FirmDescriptives firm_descriptives(const MultilevelNetwork& net, const std::string& segment)
{
    if (!net.config.has_segment(segment))
        throw validation_error("firm_descriptives: unknown segment '" + segment + "'");
    FirmDescriptives out;
    out.segment = segment;

    std::vector<std::string> all;
    std::vector<std::size_t> all_idx;
    for (const auto& [firm, segs] : net.firm_segments) {
        if (segs.count(segment)) {
            all.push_back(firm);
            all_idx.push_back(net.ownership.index_of(firm));
        }
    }
    out.all = detail::population_stats(net, all);

    const Graph sub = net.ownership.induced(all_idx).undirected_copy();
    std::vector<std::string> connected;
    for (const auto& comp : sub.connected_components()) {
        if (comp.size() < 2)
            continue;
        for (std::size_t v : comp)
            connected.push_back(sub.id_of(v));
    }
    std::sort(connected.begin(), connected.end());
    out.connected = detail::population_stats(net, connected);
    return out;
}

// --- exports -----------------------------------------------------------------

inline void write_filtered_edges(const FilteredTradeNetwork& fnet, const std::string& path,
                                 const std::string& config_hash = "")
{
    CsvWriter w(path);
    w.stage_comment("filter_" + fnet.mode.label(), config_hash);
    w.raw_line("iso3_a,iso3_b,n_motifs");
    for (const auto& [pair, list] : fnet.provenance)
        w.row({pair.first, pair.second, std::to_string(list.size())});
    // retained isolates are node-only rows with an empty second column
    for (std::size_t v = 0; v < fnet.graph.node_count(); ++v)
        if (fnet.graph.degree(v) == 0)
            w.row({fnet.graph.id_of(v), "", "0"});
    w.close();
}

inline void write_motifs_csv(const std::vector<Motif>& motifs, const SegmentMode& mode,
                             const std::string& path, const std::string& config_hash = "")
{
    CsvWriter w(path);
    w.stage_comment("motifs_" + mode.label(), config_hash);
    w.raw_line("iso3_a,iso3_b,firm_f,firm_g,product_code,direction");
    for (const auto& m : motifs)
        w.row({m.country_a, m.country_b, m.firm_f, m.firm_g, m.product_code,
               to_string(m.direction)});
    w.close();
}

inline std::vector<Motif> read_motifs_csv(const std::string& path)
{
    std::vector<Motif> out;
    for (const auto& r : read_csv(
             path, {"iso3_a", "iso3_b", "firm_f", "firm_g", "product_code", "direction"}))
        out.push_back({r.fields[0], r.fields[1], r.fields[2], r.fields[3], r.fields[4],
                       trade_direction_from_string(r.fields[5])});
    return out;
}

inline void write_firm_descriptives(const FirmDescriptives& d, const std::string& path,
                                    const std::string& config_hash = "")
{
    CsvWriter w(path);
    w.stage_comment("firm_descriptives", config_hash);
    w.raw_line("segment,population,n_firms,mean_operating_revenue,sd_operating_revenue,"
               "mean_employees,sd_employees");
    auto fmt = [](const std::optional<double>& v) {
        return v ? format_fixed(*v, 4) : std::string("NA");
    };
    auto emit = [&](const std::string& pop, const FirmPopulationStats& s) {
        w.row({d.segment, pop, std::to_string(s.n_firms), fmt(s.revenue.mean),
               fmt(s.revenue.sd), fmt(s.employees.mean), fmt(s.employees.sd)});
    };
    emit("all", d.all);
    emit("connected", d.connected);
    w.close();
}

} // namespace iftnet
