#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "iftnet/ergm/statistics.hpp"

namespace iftnet {

struct McmcParams {
    std::size_t burn_in = 20000;    // proposals before the first retained sample
    std::size_t interval = 50;      // proposals between retained samples
    std::size_t sample_size = 2000; // retained samples, summed over chains
    std::size_t chains = 2;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (burn_in == 0 || interval == 0 || sample_size == 0 || chains == 0)
            throw validation_error("McmcParams: all fields must be positive");
    }
};

// Metropolis-Hastings over single edge toggles, dyads proposed uniformly.
// Keeps its statistic vector updated incrementally from change statistics.
class EdgeToggleSampler {
public:
    EdgeToggleSampler(Graph start, const ErgmModel& model, std::vector<double> theta,
                      std::uint64_t seed)
        : g_(std::move(start)), model_(&model), theta_(std::move(theta)), rng_(seed),
          stats_(compute_statistics(g_, model)), delta_(model.term_count())
    {
        if (theta_.size() != model.term_count())
            throw validation_error("EdgeToggleSampler: theta length mismatch");
        if (g_.node_count() < 2)
            throw validation_error("EdgeToggleSampler: need at least 2 nodes");
    }

    void step()
    {
        const std::size_t n = g_.node_count();
        const std::size_t i = rng_.index(n);
        std::size_t j = rng_.index(n - 1);
        if (j >= i)
            ++j;
        const bool present = g_.has_edge(i, j);
        const double s = present ? -1.0 : 1.0;
        change_statistics(g_, *model_, i, j, delta_.data(), ws_);
        double logr = 0.0;
        for (std::size_t t = 0; t < delta_.size(); ++t)
            logr += theta_[t] * delta_[t];
        logr *= s;
        const double u = rng_.uniform01();
        if (u < std::exp(logr)) {
            g_.set_edge(i, j, !present);
            for (std::size_t t = 0; t < delta_.size(); ++t)
                stats_[t] += s * delta_[t];
            ++accepts_;
        }
        ++proposals_;
        const std::size_t m = g_.edge_count();
        if (m == 0 || m == g_.dyad_count())
            boundary_run_ = std::max(boundary_run_, ++boundary_streak_);
        else
            boundary_streak_ = 0;
    }

    void run(std::size_t proposals)
    {
        for (std::size_t p = 0; p < proposals; ++p)
            step();
    }

    const Graph& graph() const { return g_; }
    const std::vector<double>& statistics() const { return stats_; }
    std::size_t proposals() const { return proposals_; }
    std::size_t accepts() const { return accepts_; }
    std::size_t boundary_run() const { return boundary_run_; }

private:
    Graph g_;
    const ErgmModel* model_;
    std::vector<double> theta_;
    Rng rng_;
    std::vector<double> stats_, delta_;
    ChangeStatWorkspace ws_;
    std::size_t proposals_ = 0, accepts_ = 0;
    std::size_t boundary_run_ = 0, boundary_streak_ = 0;
};

struct SamplerDiagnostics {
    std::size_t proposals = 0, accepts = 0;
    std::size_t max_boundary_run = 0;

    double acceptance_rate() const
    {
        return proposals == 0 ? 0.0
                              : static_cast<double>(accepts) / static_cast<double>(proposals);
    }
};

// Runs the configured chains sequentially in chain order; per-chain seeds are
// derived from the master seed, so the retained stream is identical however
// chains are scheduled. on_sample(sampler) fires at every retained point.
template <typename F>
inline SamplerDiagnostics run_chains(const ErgmModel& model, const std::vector<double>& theta,
                                     const McmcParams& params, const Graph* start, F&& on_sample)
{
    params.validate();
    model.require_bound();
    if (start && start->node_count() != model.node_count())
        throw validation_error("run_chains: start graph node count mismatch");

    SamplerDiagnostics diag;
    const std::size_t base = params.sample_size / params.chains;
    const std::size_t extra = params.sample_size % params.chains;
    for (std::size_t c = 0; c < params.chains; ++c) {
        const std::size_t quota = base + (c < extra ? 1 : 0);
        if (quota == 0)
            continue;
        Graph g0 = start ? *start : Graph(EdgeMode::undirected, model.node_ids());
        EdgeToggleSampler s(std::move(g0), model, theta, derive_seed(params.seed, c));
        s.run(params.burn_in);
        for (std::size_t k = 0; k < quota; ++k) {
            s.run(params.interval);
            on_sample(s);
        }
        diag.proposals += s.proposals();
        diag.accepts += s.accepts();
        diag.max_boundary_run = std::max(diag.max_boundary_run, s.boundary_run());
    }
    return diag;
}

struct SampleResult {
    std::vector<Graph> graphs;  // empty unless requested
    Eigen::MatrixXd statistics; // sample_size x term_count
    SamplerDiagnostics diagnostics;
};

inline SampleResult sample_networks(const ErgmModel& model, const std::vector<double>& theta,
                                    const McmcParams& params, const Graph* start = nullptr,
                                    bool keep_graphs = true)
{
    SampleResult out;
    out.statistics.resize(static_cast<Eigen::Index>(params.sample_size),
                          static_cast<Eigen::Index>(model.term_count()));
    Eigen::Index row = 0;
    if (keep_graphs)
        out.graphs.reserve(params.sample_size);
    out.diagnostics =
        run_chains(model, theta, params, start, [&](const EdgeToggleSampler& s) {
            const auto& z = s.statistics();
            for (std::size_t t = 0; t < z.size(); ++t)
                out.statistics(row, static_cast<Eigen::Index>(t)) = z[t];
            ++row;
            if (keep_graphs)
                out.graphs.push_back(s.graph());
        });
    return out;
}

// Degeneracy policy shared by estimation and goodness of fit: a chain parked
// at the empty or complete graph, or wholesale rejection, is not a sample.
inline void require_healthy_sampling(const SamplerDiagnostics& diag)
{
    if (diag.max_boundary_run >= 1000)
        throw estimation_error(
            "degenerate sampling: chain absorbed at empty/complete graph for " +
            std::to_string(diag.max_boundary_run) + " proposals");
    if (diag.proposals >= 10000 && diag.acceptance_rate() < 0.05)
        throw estimation_error("degenerate sampling: acceptance rate " +
                               format_fixed(diag.acceptance_rate(), 4) +
                               " (over 95% of proposals rejected)");
}

} // namespace iftnet
