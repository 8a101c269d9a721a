#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "iftnet/ergm/model.hpp"
#include "iftnet/graph.hpp"

namespace iftnet {

namespace detail {

inline void check_model_graph(const Graph& g, const ErgmModel& model)
{
    if (!g.undirected())
        throw validation_error("ERGM statistics require an undirected graph");
    if (g.node_count() != model.node_count())
        throw validation_error("graph has " + std::to_string(g.node_count()) +
                               " nodes, model expects " + std::to_string(model.node_count()));
}

inline std::size_t popcount_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words)
{
    std::size_t c = 0;
    for (std::size_t w = 0; w < words; ++w)
        c += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    return c;
}

} // namespace detail

// degree histogram D_i, index = degree
inline std::vector<std::size_t> degree_histogram(const Graph& g)
{
    std::vector<std::size_t> hist(g.node_count() == 0 ? 1 : g.node_count(), 0);
    for (std::size_t v = 0; v < g.node_count(); ++v)
        ++hist[g.degree(v)];
    return hist;
}

// EP_i: edges whose endpoints have exactly i common neighbours
inline std::vector<std::size_t> esp_histogram(const Graph& g)
{
    const std::size_t n = g.node_count();
    std::vector<std::size_t> hist(n < 2 ? 1 : n - 1, 0);
    for (const auto& [i, j] : g.edges())
        ++hist[g.shared_partners(i, j)];
    return hist;
}

// DP_i over all dyads, edge or not
inline std::vector<std::size_t> dsp_histogram(const Graph& g)
{
    const std::size_t n = g.node_count();
    std::vector<std::size_t> hist(n < 2 ? 1 : n - 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            ++hist[g.shared_partners(i, j)];
    return hist;
}

inline std::vector<double> compute_statistics(const Graph& g, const ErgmModel& model)
{
    detail::check_model_graph(g, model);
    const std::size_t n = g.node_count();
    std::vector<double> z(model.term_count(), 0.0);
    const auto edges = g.edges();

    for (std::size_t t = 0; t < model.term_count(); ++t) {
        const TermSpec& term = model.terms()[t];
        switch (term.kind) {
        case TermKind::edges:
            z[t] = static_cast<double>(g.edge_count());
            break;
        case TermKind::gw_degree: {
            const double et = std::exp(term.decay);
            const double u = 1.0 - std::exp(-term.decay);
            double s = 0.0;
            for (std::size_t v = 0; v < n; ++v)
                s += 1.0 - powi(u, g.degree(v));
            z[t] = et * s;
            break;
        }
        case TermKind::gwesp: {
            const double et = std::exp(term.decay);
            const double u = 1.0 - std::exp(-term.decay);
            double s = 0.0;
            for (const auto& [i, j] : edges)
                s += 1.0 - powi(u, g.shared_partners(i, j));
            z[t] = et * s;
            break;
        }
        case TermKind::gwdsp: {
            const double et = std::exp(term.decay);
            const double u = 1.0 - std::exp(-term.decay);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    s += 1.0 - powi(u, g.shared_partners(i, j));
            z[t] = et * s;
            break;
        }
        case TermKind::activity: {
            const auto& x = model.attribute(term.attribute);
            double s = 0.0;
            for (const auto& [i, j] : edges)
                s += x[i] + x[j];
            z[t] = s;
            break;
        }
        case TermKind::difference: {
            const auto& x = model.attribute(term.attribute);
            double s = 0.0;
            for (const auto& [i, j] : edges)
                s += std::abs(x[i] - x[j]);
            z[t] = s;
            break;
        }
        case TermKind::edge_covariate: {
            const auto& w = model.dyad_matrix(term.attribute);
            double s = 0.0;
            for (const auto& [i, j] : edges)
                s += w[i * n + j];
            z[t] = s;
            break;
        }
        }
    }
    return z;
}

// Reusable buffers for the masked-row computation; one per sampler chain.
struct ChangeStatWorkspace {
    std::vector<std::uint64_t> ri, rj;
};

// z(g with ij present) - z(g with ij absent), independent of the edge's
// current state. All neighbourhood quantities are taken in the graph with
// the dyad forced off, which the closed forms below expect; masking the two
// incident bits out of copies of the rows achieves that without mutation.
inline void change_statistics(const Graph& g, const ErgmModel& model, std::size_t i,
                              std::size_t j, double* out, ChangeStatWorkspace& ws)
{
    detail::check_model_graph(g, model);
    if (i == j)
        throw validation_error("change_statistics: i = j");
    const std::size_t n = g.node_count();
    if (i >= n || j >= n)
        throw validation_error("change_statistics: node index out of range");

    const std::size_t words = g.words_per_row();
    ws.ri.assign(g.row(i), g.row(i) + words);
    ws.rj.assign(g.row(j), g.row(j) + words);
    ws.ri[j / 64] &= ~(std::uint64_t{1} << (j % 64));
    ws.rj[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    const std::uint64_t* ri = ws.ri.data();
    const std::uint64_t* rj = ws.rj.data();

    for (std::size_t t = 0; t < model.term_count(); ++t) {
        const TermSpec& term = model.terms()[t];
        switch (term.kind) {
        case TermKind::edges:
            out[t] = 1.0;
            break;
        case TermKind::gw_degree: {
            const double u = 1.0 - std::exp(-term.decay);
            std::size_t di = 0, dj = 0;
            for (std::size_t w = 0; w < words; ++w) {
                di += static_cast<std::size_t>(std::popcount(ri[w]));
                dj += static_cast<std::size_t>(std::popcount(rj[w]));
            }
            out[t] = powi(u, di) + powi(u, dj);
            break;
        }
        case TermKind::gwesp: {
            const double et = std::exp(term.decay);
            const double u = 1.0 - std::exp(-term.decay);
            // the new edge itself, plus one increment per edge from an
            // endpoint to a common neighbour
            std::size_t cn = 0;
            double s = 0.0;
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t bits = ri[w] & rj[w];
                cn += static_cast<std::size_t>(std::popcount(bits));
                while (bits) {
                    const std::size_t k =
                        w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    s += powi(u, detail::popcount_and(ri, g.row(k), words));
                    s += powi(u, detail::popcount_and(rj, g.row(k), words));
                }
            }
            out[t] = et * (1.0 - powi(u, cn)) + s;
            break;
        }
        case TermKind::gwdsp: {
            const double u = 1.0 - std::exp(-term.decay);
            // dyads (i, x) for x ~ j and (j, x) for x ~ i gain one shared
            // partner each; the dyad (i, j) itself is unaffected
            double s = 0.0;
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t bits = rj[w];
                while (bits) {
                    const std::size_t x =
                        w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    s += powi(u, detail::popcount_and(ri, g.row(x), words));
                }
                bits = ri[w];
                while (bits) {
                    const std::size_t x =
                        w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    s += powi(u, detail::popcount_and(rj, g.row(x), words));
                }
            }
            out[t] = s;
            break;
        }
        case TermKind::activity: {
            const auto& x = model.attribute(term.attribute);
            out[t] = x[i] + x[j];
            break;
        }
        case TermKind::difference: {
            const auto& x = model.attribute(term.attribute);
            out[t] = std::abs(x[i] - x[j]);
            break;
        }
        case TermKind::edge_covariate:
            out[t] = model.dyad_matrix(term.attribute)[i * n + j];
            break;
        }
    }
}

inline std::vector<double> change_statistics(const Graph& g, const ErgmModel& model,
                                             std::size_t i, std::size_t j)
{
    std::vector<double> out(model.term_count());
    ChangeStatWorkspace ws;
    change_statistics(g, model, i, j, out.data(), ws);
    return out;
}

} // namespace iftnet
