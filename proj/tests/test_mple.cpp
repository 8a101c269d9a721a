#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "iftnet/common.hpp"
#include "iftnet/ergm/mple.hpp"
#include "iftnet/oracle.hpp"

using namespace iftnet;
using Catch::Matchers::WithinAbs;

namespace {

Graph graph_with_edges(std::size_t n, std::size_t m, const std::vector<std::string>& ids = {})
{
    Graph g = ids.empty() ? Graph::indexed(EdgeMode::undirected, n)
                          : Graph(EdgeMode::undirected, ids);
    std::size_t placed = 0;
    for (std::size_t i = 0; i < n && placed < m; ++i)
        for (std::size_t j = i + 1; j < n && placed < m; ++j) {
            g.add_edge(i, j);
            ++placed;
        }
    if (placed != m)
        throw validation_error("graph_with_edges: too many edges requested");
    return g;
}

// edges + activity + difference + edge_covariate on six nodes
ErgmModel dyad_independent_fixture()
{
    ErgmModel model({TermSpec::edges(), TermSpec::activity("x"), TermSpec::difference("x"),
                     TermSpec::edge_covariate("w")},
                    {"A", "B", "C", "D", "E", "F"});
    model.bind_attribute("x", {0.3, -1.2, 0.8, 2.0, -0.4, 1.1});
    const std::size_t n = 6;
    std::vector<double> w(n * n, 0.0);
    Rng rng(2024);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            w[i * n + j] = w[j * n + i] = rng.uniform(-1.0, 1.0);
    model.bind_dyad_matrix("w", w);
    return model;
}

} // namespace

TEST_CASE("edges-only mple is the empirical logit", "[mple]")
{
    const ErgmModel model = ErgmModel::structural({TermSpec::edges()}, 5);
    const auto beta = mple(graph_with_edges(5, 5), model);
    REQUIRE(beta.size() == 1);
    CHECK_THAT(beta[0], WithinAbs(0.0, 1e-9));

    const ErgmModel model15 = ErgmModel::structural({TermSpec::edges()}, 15);
    const auto beta15 = mple(graph_with_edges(15, 16), model15);
    CHECK_THAT(beta15[0], WithinAbs(std::log(16.0 / 89.0), 1e-8));
}

TEST_CASE("mple equals the exact mle on dyad-independent models", "[mple]")
{
    const ErgmModel model = dyad_independent_fixture();
    const std::size_t n = 6;
    Graph g(EdgeMode::undirected, model.node_ids());
    Rng edges_rng(5150);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edges_rng.bernoulli(0.45))
                g.add_edge(i, j);
    REQUIRE(g.edge_count() >= 3);
    REQUIRE(g.edge_count() <= 12);

    const auto beta = mple(g, model);
    const ExactOracle oracle(model);
    const auto mle = oracle.exact_mle(g, 1e-10);
    REQUIRE(beta.size() == mle.size());
    for (std::size_t t = 0; t < beta.size(); ++t)
        CHECK_THAT(beta[t], WithinAbs(mle[t], 1e-6));

    const double ll = dyad_independent_log_likelihood(g, model, beta);
    CHECK_THAT(ll, WithinAbs(oracle.log_likelihood(beta, g), 1e-8));
}

TEST_CASE("collinear change statistics are refused", "[mple]")
{
    // a constant attribute makes activity twice the edges column
    ErgmModel model({TermSpec::edges(), TermSpec::activity("x")}, {"A", "B", "C", "D"});
    model.bind_attribute("x", {1.0, 1.0, 1.0, 1.0});
    Graph g(EdgeMode::undirected, model.node_ids());
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    CHECK_THROWS_WITH(mple(g, model), Catch::Matchers::ContainsSubstring("collinear"));
}

TEST_CASE("separated data is reported rather than fit", "[mple]")
{
    const ErgmModel model = ErgmModel::structural({TermSpec::edges()}, 5);
    const Graph full = graph_with_edges(5, 10);
    CHECK_THROWS_AS(mple(full, model), estimation_error);
    const Graph empty = Graph::indexed(EdgeMode::undirected, 5);
    CHECK_THROWS_AS(mple(empty, model), estimation_error);
}

TEST_CASE("exact log-likelihood refuses dyad-dependent models", "[mple]")
{
    const ErgmModel model = ErgmModel::structural({TermSpec::edges(), TermSpec::gwesp(0.5)}, 5);
    const Graph g = graph_with_edges(5, 4);
    CHECK_THROWS_AS(dyad_independent_log_likelihood(g, model, {0.0, 0.0}), estimation_error);
}

TEST_CASE("edges-only log-likelihood has its closed form", "[mple]")
{
    const ErgmModel model = ErgmModel::structural({TermSpec::edges()}, 5);
    const Graph g = graph_with_edges(5, 4);
    const double theta = -0.35;
    const double expected = 4.0 * theta - 10.0 * std::log1p(std::exp(theta));
    CHECK_THAT(dyad_independent_log_likelihood(g, model, {theta}), WithinAbs(expected, 1e-12));
}
