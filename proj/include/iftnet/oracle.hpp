#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "iftnet/ergm/statistics.hpp"

namespace iftnet {

// dyad (i < j) -> bit position, lexicographic over (i, j)
inline std::size_t dyad_rank(std::size_t n, std::size_t i, std::size_t j)
{
    if (i >= j || j >= n)
        throw validation_error("dyad_rank: need i < j < n");
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Exhaustive enumeration of every labeled simple graph on n <= 7 nodes with
// cached statistics. Statistics are recomputed in full at every step of a
// Gray-code walk (one toggle per mask), so the cache is independent of the
// incremental change-statistic code it is used to check.
class ExactOracle {
public:
    explicit ExactOracle(const ErgmModel& model) : model_(model)
    {
        const std::size_t n = model.node_count();
        if (n > 7)
            throw validation_error("ExactOracle: enumeration capped at 7 nodes");
        if (n < 2)
            throw validation_error("ExactOracle: need at least 2 nodes");
        model.require_bound();
        dyads_ = n * (n - 1) / 2;
        const std::uint64_t total = std::uint64_t{1} << dyads_;
        pairs_.reserve(dyads_);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                pairs_.emplace_back(i, j);

        const std::size_t k = model.term_count();
        stats_.assign(static_cast<std::size_t>(total) * k, 0.0);
        Graph g(EdgeMode::undirected, model.node_ids());
        std::uint64_t gray = 0;
        for (std::uint64_t seq = 0;; ++seq) {
            const std::vector<double> z = compute_statistics(g, model);
            std::copy(z.begin(), z.end(), stats_.begin() + static_cast<std::size_t>(gray) * k);
            if (seq + 1 == total)
                break;
            const std::uint64_t next = (seq + 1) ^ ((seq + 1) >> 1);
            const std::uint64_t flipped = gray ^ next;
            const int bit = std::countr_zero(flipped);
            const auto& [i, j] = pairs_[static_cast<std::size_t>(bit)];
            g.toggle(i, j);
            gray = next;
        }
    }

    const ErgmModel& model() const { return model_; }
    std::size_t dyad_count() const { return dyads_; }
    std::uint64_t graph_count() const { return std::uint64_t{1} << dyads_; }

    const double* stats_of(std::uint64_t mask) const
    {
        return stats_.data() + static_cast<std::size_t>(mask) * model_.term_count();
    }

    static std::uint64_t graph_mask(const Graph& g)
    {
        const std::size_t n = g.node_count();
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (g.has_edge(i, j))
                    mask |= std::uint64_t{1} << dyad_rank(n, i, j);
        return mask;
    }

    Graph graph_from_mask(std::uint64_t mask) const
    {
        Graph g(EdgeMode::undirected, model_.node_ids());
        for (std::size_t r = 0; r < dyads_; ++r)
            if ((mask >> r) & 1)
                g.add_edge(pairs_[r].first, pairs_[r].second);
        return g;
    }

    double log_k(const std::vector<double>& theta) const
    {
        require_theta(theta);
        const std::size_t k = model_.term_count();
        double mx = -HUGE_VAL;
        const std::uint64_t total = graph_count();
        std::vector<double> dots(static_cast<std::size_t>(total));
        for (std::uint64_t m = 0; m < total; ++m) {
            const double* z = stats_of(m);
            double d = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                d += theta[t] * z[t];
            dots[static_cast<std::size_t>(m)] = d;
            mx = std::max(mx, d);
        }
        double acc = 0.0;
        for (double d : dots)
            acc += std::exp(d - mx);
        return mx + std::log(acc);
    }

    // probability of every graph mask under theta
    std::vector<double> distribution(const std::vector<double>& theta) const
    {
        const double lk = log_k(theta);
        const std::size_t k = model_.term_count();
        std::vector<double> p(static_cast<std::size_t>(graph_count()));
        for (std::uint64_t m = 0; m < graph_count(); ++m) {
            const double* z = stats_of(m);
            double d = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                d += theta[t] * z[t];
            p[static_cast<std::size_t>(m)] = std::exp(d - lk);
        }
        return p;
    }

    std::vector<double> expected_stats(const std::vector<double>& theta) const
    {
        const std::vector<double> p = distribution(theta);
        const std::size_t k = model_.term_count();
        std::vector<double> e(k, 0.0);
        for (std::uint64_t m = 0; m < graph_count(); ++m) {
            const double* z = stats_of(m);
            for (std::size_t t = 0; t < k; ++t)
                e[t] += p[static_cast<std::size_t>(m)] * z[t];
        }
        return e;
    }

    Eigen::MatrixXd stat_covariance(const std::vector<double>& theta) const
    {
        const std::vector<double> p = distribution(theta);
        const std::vector<double> e = expected_stats(theta);
        const std::size_t k = model_.term_count();
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                  static_cast<Eigen::Index>(k));
        for (std::uint64_t m = 0; m < graph_count(); ++m) {
            const double* z = stats_of(m);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                        p[static_cast<std::size_t>(m)] * (z[a] - e[a]) * (z[b] - e[b]);
        }
        return c;
    }

    double log_likelihood(const std::vector<double>& theta, const Graph& observed) const
    {
        const std::uint64_t mask = graph_mask(observed);
        const double* z = stats_of(mask);
        double d = 0.0;
        for (std::size_t t = 0; t < model_.term_count(); ++t)
            d += theta[t] * z[t];
        return d - log_k(theta);
    }

    // Newton with exact moments; the likelihood is concave, a backtracking
    // halving step keeps every iteration an ascent.
    std::vector<double> exact_mle(const Graph& observed, double grad_tol = 1e-8,
                                  std::size_t max_iter = 200) const
    {
        const std::size_t k = model_.term_count();
        const std::uint64_t obs_mask = graph_mask(observed);
        const double* zo = stats_of(obs_mask);

        // per-coordinate support boundary: the MLE diverges there
        for (std::size_t t = 0; t < k; ++t) {
            double lo = HUGE_VAL, hi = -HUGE_VAL;
            for (std::uint64_t m = 0; m < graph_count(); ++m) {
                lo = std::min(lo, stats_of(m)[t]);
                hi = std::max(hi, stats_of(m)[t]);
            }
            if (zo[t] <= lo || zo[t] >= hi)
                throw estimation_error("exact_mle: observed statistic '" +
                                       model_.term_names()[t] +
                                       "' lies on the attainable boundary, MLE diverges");
        }

        std::vector<double> theta(k, 0.0);
        double ll = log_likelihood(theta, observed);
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            const std::vector<double> e = expected_stats(theta);
            Eigen::VectorXd grad(static_cast<Eigen::Index>(k));
            for (std::size_t t = 0; t < k; ++t)
                grad(static_cast<Eigen::Index>(t)) = zo[t] - e[t];
            if (grad.norm() <= grad_tol)
                return theta;
            Eigen::MatrixXd c = stat_covariance(theta);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
            Eigen::VectorXd step = ldlt.solve(grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite())
                throw estimation_error("exact_mle: singular information matrix");
            double scale = 1.0;
            for (int half = 0; half < 50; ++half) {
                std::vector<double> cand(k);
                for (std::size_t t = 0; t < k; ++t)
                    cand[t] = theta[t] + scale * step(static_cast<Eigen::Index>(t));
                const double cand_ll = log_likelihood(cand, observed);
                // the enumerated log-likelihood carries rounding noise of
                // order eps * |ll|; near the optimum a genuine Newton step
                // can apparently lose that much, so the ascent test allows it
                if (cand_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) {
                    theta = std::move(cand);
                    ll = cand_ll;
                    break;
                }
                scale *= 0.5;
            }
            double maxabs = 0.0;
            for (double th : theta)
                maxabs = std::max(maxabs, std::abs(th));
            if (maxabs > 50.0 || !std::isfinite(ll))
                throw estimation_error("exact_mle: estimate diverging, observed statistics "
                                       "on or near the attainable boundary");
        }
        throw estimation_error("exact_mle: no convergence within iteration budget");
    }

private:
    void require_theta(const std::vector<double>& theta) const
    {
        if (theta.size() != model_.term_count())
            throw validation_error("ExactOracle: theta length mismatch");
    }

    ErgmModel model_;
    std::size_t dyads_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<double> stats_; // graph-mask major, term minor
};

} // namespace iftnet
