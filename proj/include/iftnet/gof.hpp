#pragma once

#include <json.hpp>
#include <algorithm>
#include <string>
#include <vector>

#include "iftnet/csv.hpp"
#include "iftnet/ergm/estimation.hpp"

namespace iftnet {

struct GofFamily {
    std::string name;
    std::vector<std::string> bins;
    std::vector<double> observed;
    std::vector<double> qmin, q05, q50, q95, qmax;

    // share of bins whose observed value sits inside the [5%, 95%] band
    double envelope_coverage() const
    {
        if (bins.empty())
            return 1.0;
        std::size_t inside = 0;
        for (std::size_t b = 0; b < bins.size(); ++b)
            if (observed[b] >= q05[b] && observed[b] <= q95[b])
                ++inside;
        return static_cast<double>(inside) / static_cast<double>(bins.size());
    }
};

struct GofReport {
    std::vector<GofFamily> families;
    std::size_t n_simulations = 0;
    std::uint64_t seed = 0;
    SamplerDiagnostics diagnostics;

    const GofFamily& family(const std::string& name) const
    {
        for (const auto& f : families)
            if (f.name == name)
                return f;
        throw error("no GOF family '" + name + "'");
    }
};

namespace detail {

// type-7 quantile, the spreadsheet/R default
inline double quantile_sorted(const std::vector<double>& sorted, double p)
{
    if (sorted.empty())
        throw error("quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline GofFamily make_family(std::string name, std::vector<std::string> bins,
                             std::vector<double> observed,
                             std::vector<std::vector<double>> simulated_by_bin)
{
    GofFamily f;
    f.name = std::move(name);
    f.bins = std::move(bins);
    f.observed = std::move(observed);
    for (auto& values : simulated_by_bin) {
        std::sort(values.begin(), values.end());
        f.qmin.push_back(values.front());
        f.q05.push_back(quantile_sorted(values, 0.05));
        f.q50.push_back(quantile_sorted(values, 0.50));
        f.q95.push_back(quantile_sorted(values, 0.95));
        f.qmax.push_back(values.back());
    }
    return f;
}

inline std::vector<double> geodesic_bins(const Graph& g)
{
    // fixed support 1..n-1 plus the unreachable bucket
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    const auto hist = g.geodesic_distribution();
    for (const auto& [len, count] : hist.finite)
        out[len - 1] = static_cast<double>(count);
    out[n - 1] = static_cast<double>(hist.unreachable);
    return out;
}

} // namespace detail

// Simulates at the fitted coefficients and brackets the observed degree,
// edgewise-shared-partner, geodesic, and model-statistic values with
// per-bin quantile envelopes.
inline GofReport goodness_of_fit(const Graph& g, const ErgmFit& fit, const ErgmModel& model,
                                 std::size_t n_sim, std::uint64_t seed,
                                 const McmcParams& base_params = {})
{
    detail::check_model_graph(g, model);
    if (!fit.converged)
        throw estimation_error("goodness_of_fit: fit did not converge");
    if (fit.theta.size() != model.term_count())
        throw validation_error("goodness_of_fit: fit/model term mismatch");
    if (n_sim < 20)
        throw validation_error("goodness_of_fit: n_sim must be at least 20");

    McmcParams params = base_params;
    params.sample_size = n_sim;
    params.seed = seed;
    SampleResult sim = sample_networks(model, fit.theta, params, &g, /*keep_graphs=*/true);
    require_healthy_sampling(sim.diagnostics);

    const std::size_t n = g.node_count();
    const std::size_t k = model.term_count();

    const std::size_t deg_bins = n;
    const std::size_t esp_bins = n < 2 ? 1 : n - 1;
    const std::size_t geo_bins = n;
    std::vector<std::vector<double>> deg(deg_bins, std::vector<double>{});
    std::vector<std::vector<double>> esp(esp_bins, std::vector<double>{});
    std::vector<std::vector<double>> geo(geo_bins, std::vector<double>{});
    std::vector<std::vector<double>> stats(k, std::vector<double>{});

    for (std::size_t s = 0; s < sim.graphs.size(); ++s) {
        const Graph& h = sim.graphs[s];
        const auto dh = degree_histogram(h);
        for (std::size_t b = 0; b < deg_bins; ++b)
            deg[b].push_back(b < dh.size() ? static_cast<double>(dh[b]) : 0.0);
        const auto eh = esp_histogram(h);
        for (std::size_t b = 0; b < esp_bins; ++b)
            esp[b].push_back(b < eh.size() ? static_cast<double>(eh[b]) : 0.0);
        const auto gh = detail::geodesic_bins(h);
        for (std::size_t b = 0; b < geo_bins; ++b)
            geo[b].push_back(gh[b]);
        for (std::size_t t = 0; t < k; ++t)
            stats[t].push_back(sim.statistics(static_cast<Eigen::Index>(s),
                                              static_cast<Eigen::Index>(t)));
    }

    auto label_range = [](std::size_t count, std::size_t from) {
        std::vector<std::string> out;
        for (std::size_t b = 0; b < count; ++b)
            out.push_back(std::to_string(from + b));
        return out;
    };

    const auto obs_deg_hist = degree_histogram(g);
    std::vector<double> obs_deg(deg_bins, 0.0);
    for (std::size_t b = 0; b < deg_bins && b < obs_deg_hist.size(); ++b)
        obs_deg[b] = static_cast<double>(obs_deg_hist[b]);
    const auto obs_esp_hist = esp_histogram(g);
    std::vector<double> obs_esp(esp_bins, 0.0);
    for (std::size_t b = 0; b < esp_bins && b < obs_esp_hist.size(); ++b)
        obs_esp[b] = static_cast<double>(obs_esp_hist[b]);

    std::vector<std::string> geo_labels = label_range(geo_bins - 1, 1);
    geo_labels.push_back("inf");

    GofReport report;
    report.n_simulations = n_sim;
    report.seed = seed;
    report.diagnostics = sim.diagnostics;
    report.families.push_back(
        detail::make_family("degree", label_range(deg_bins, 0), obs_deg, std::move(deg)));
    report.families.push_back(
        detail::make_family("esp", label_range(esp_bins, 0), obs_esp, std::move(esp)));
    report.families.push_back(detail::make_family("geodesic", std::move(geo_labels),
                                                  detail::geodesic_bins(g), std::move(geo)));
    report.families.push_back(detail::make_family("model_stats", model.term_names(),
                                                  fit.observed_stats, std::move(stats)));
    return report;
}

inline void write_gof_family_csv(const GofFamily& f, const std::string& path,
                                 const std::string& config_hash = "")
{
    CsvWriter w(path);
    w.stage_comment("gof_" + f.name, config_hash);
    w.raw_line("bin,observed,min,q05,median,q95,max");
    for (std::size_t b = 0; b < f.bins.size(); ++b)
        w.row({f.bins[b], format_double(f.observed[b]), format_double(f.qmin[b]),
               format_double(f.q05[b]), format_double(f.q50[b]), format_double(f.q95[b]),
               format_double(f.qmax[b])});
    w.close();
}

inline nlohmann::json gof_to_json(const GofReport& report)
{
    nlohmann::json families = nlohmann::json::object();
    for (const auto& f : report.families)
        families[f.name] = {{"bins", f.bins.size()},
                            {"envelope_coverage", f.envelope_coverage()}};
    return {{"n_simulations", report.n_simulations},
            {"seed", report.seed},
            {"acceptance_rate", report.diagnostics.acceptance_rate()},
            {"families", families}};
}

inline void write_gof(const GofReport& report, const std::string& dir,
                      const std::string& config_hash = "")
{
    for (const auto& f : report.families)
        write_gof_family_csv(f, dir + "/gof_" + f.name + ".csv", config_hash);
    std::ofstream out(dir + "/gof_summary.json");
    if (!out)
        throw io_error("cannot open '" + dir + "/gof_summary.json' for writing");
    out << gof_to_json(report).dump(2) << "\n";
    if (!out)
        throw io_error("write failed for '" + dir + "/gof_summary.json'");
}

} // namespace iftnet
