#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "iftnet/graph.hpp"

namespace iftnet {

// Descriptive statistics for an undirected network, one row per network in
// reports. Internal values stay at full precision; rounding happens only
// when a report is written.
struct NetworkSummary {
    std::size_t size = 0;
    double density = 0.0;
    double average_degree = 0.0;
    std::optional<double> degree_centralization; // needs n >= 3
    std::optional<double> degree_assortativity;  // undefined at zero variance
};

inline double density(const Graph& g)
{
    if (g.node_count() < 2)
        throw validation_error("density: need at least 2 nodes");
    const double n = static_cast<double>(g.node_count());
    return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

inline double average_degree(const Graph& g)
{
    if (g.node_count() < 1)
        throw validation_error("average_degree: empty node set");
    return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

// Freeman centralization: sum of (d_max - d_v) over the maximum attainable
// (n-1)(n-2); 1 for a star, 0 when all degrees are equal.
inline double degree_centralization(const Graph& g)
{
    const std::size_t n = g.node_count();
    if (n < 3)
        throw validation_error("degree_centralization: need at least 3 nodes");
    std::size_t dmax = 0;
    for (std::size_t v = 0; v < n; ++v)
        dmax = std::max(dmax, g.degree(v));
    double acc = 0.0;
    for (std::size_t v = 0; v < n; ++v)
        acc += static_cast<double>(dmax - g.degree(v));
    return acc / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
}

// Pearson correlation of endpoint degrees over the edge list with both
// orientations included. Full degrees rather than remaining degrees; the
// correlation is shift-invariant so the value is the same.
inline std::optional<double> degree_assortativity(const Graph& g)
{
    if (g.edge_count() == 0)
        throw validation_error("degree_assortativity: graph has no edges");
    const auto edge_list = g.edges();
    const double count = 2.0 * static_cast<double>(edge_list.size());
    double sx = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [i, j] : edge_list) {
        const double di = static_cast<double>(g.degree(i));
        const double dj = static_cast<double>(g.degree(j));
        sx += di + dj;
        sxx += di * di + dj * dj;
        sxy += 2.0 * di * dj;
    }
    // both orientations share the same marginals, so x and y moments coincide
    const double mean = sx / count;
    const double var = sxx / count - mean * mean;
    const double cov = sxy / count - mean * mean;
    if (!(var > 0.0))
        return std::nullopt;
    return cov / var;
}

inline NetworkSummary summarize(const Graph& g)
{
    NetworkSummary s;
    s.size = g.node_count();
    s.density = density(g);
    s.average_degree = average_degree(g);
    if (g.node_count() >= 3)
        s.degree_centralization = degree_centralization(g);
    if (g.edge_count() >= 1)
        s.degree_assortativity = degree_assortativity(g);
    return s;
}

inline const char* summary_csv_header()
{
    return "Size,Density,Average Degree,Degree Centralisation,Degree Assortativity";
}

inline std::string summary_csv_row(const NetworkSummary& s)
{
    auto cell = [](const std::optional<double>& v) {
        return v ? format_fixed(*v, 4) : std::string("NA");
    };
    return std::to_string(s.size) + "," + format_fixed(s.density, 4) + "," +
           format_fixed(s.average_degree, 4) + "," + cell(s.degree_centralization) + "," +
           cell(s.degree_assortativity);
}

} // namespace iftnet
