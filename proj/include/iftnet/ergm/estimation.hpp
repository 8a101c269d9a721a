#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iftnet/ergm/mple.hpp"
#include "iftnet/ergm/sampler.hpp"

namespace iftnet {

inline double aic(std::size_t k, double log_likelihood)
{
    return 2.0 * static_cast<double>(k) - 2.0 * log_likelihood;
}

inline double bic(std::size_t k, double log_likelihood, std::size_t dyads)
{
    return static_cast<double>(k) * std::log(static_cast<double>(dyads)) -
           2.0 * log_likelihood;
}

// two-sided normal p-value for z = theta / se
inline double normal_p_value(double z)
{
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

inline std::string significance_stars(double p)
{
    if (p < 0.001)
        return "***";
    if (p < 0.01)
        return "**";
    if (p < 0.05)
        return "*";
    return "";
}

struct ErgmFit {
    std::vector<std::string> term_names, term_labels;
    std::vector<double> theta, std_errors, z_scores, p_values;
    std::vector<std::string> stars;
    double log_likelihood = 0.0, aic = 0.0, bic = 0.0;
    std::size_t n_nodes = 0, n_terms = 0, n_dyads = 0;
    std::vector<double> observed_stats, sim_mean; // moment-matching diagnostic
    double acceptance_rate = 0.0;
    double ess_proxy = 0.0; // smallest per-term lag-1 effective sample size
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    bool converged = false;
    bool dyad_independent = false;
};

struct EstimationOptions {
    std::size_t max_iterations = 100;
    double tolerance = 0.1;        // standardized mean difference per term
    double max_step = 1.0;         // L-infinity trust region per update
    std::size_t polish_factor = 4; // sample-size multiplier for the final moments
    std::size_t bridge_rungs = 20; // path-sampling steps for the log-likelihood
    bool compute_log_likelihood = true;
};

namespace detail {

inline Eigen::VectorXd column_means(const Eigen::MatrixXd& s)
{
    return s.colwise().mean();
}

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& s)
{
    if (s.rows() < 2)
        throw estimation_error("sample covariance needs at least 2 samples");
    Eigen::MatrixXd centered = s.rowwise() - s.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(s.rows() - 1);
}

// C * x = d with a ridge retry; the sample covariance can be numerically
// singular when a statistic barely moves
inline Eigen::VectorXd solve_spd(Eigen::MatrixXd c, const Eigen::VectorXd& d)
{
    Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd x = ldlt.solve(d);
        if (x.allFinite())
            return x;
    }
    const double ridge = 1e-8 * std::max(1.0, c.trace() / static_cast<double>(c.rows()));
    c.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> again(c);
    Eigen::VectorXd x = again.solve(d);
    if (again.info() != Eigen::Success || !x.allFinite())
        throw estimation_error("estimation: singular simulated covariance matrix");
    return x;
}

inline double min_lag1_ess(const Eigen::MatrixXd& s)
{
    const double n = static_cast<double>(s.rows());
    double worst = n;
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
        Eigen::VectorXd x = s.col(t);
        const double mean = x.mean();
        double num = 0.0, den = 0.0;
        for (Eigen::Index r = 0; r < x.size(); ++r) {
            const double c = x(r) - mean;
            den += c * c;
            if (r + 1 < x.size())
                num += c * (x(r + 1) - mean);
        }
        if (den <= 0.0)
            continue;
        const double rho = std::clamp(num / den, -0.999, 0.999);
        worst = std::min(worst, n * (1.0 - rho) / (1.0 + rho));
    }
    return std::max(worst, 1.0);
}

// log k(theta) by stepping-stone path sampling from the uniform null, where
// log k(0) = dyads * ln 2 in closed form
inline double bridge_log_k(const Graph& g, const ErgmModel& model,
                           const std::vector<double>& theta, const McmcParams& params,
                           std::size_t rungs)
{
    const std::size_t k = model.term_count();
    double log_k = static_cast<double>(model.dyad_count()) * std::log(2.0);
    for (std::size_t r = 0; r < rungs; ++r) {
        std::vector<double> theta_r(k), delta(k);
        const double f0 = static_cast<double>(r) / static_cast<double>(rungs);
        const double f1 = static_cast<double>(r + 1) / static_cast<double>(rungs);
        for (std::size_t t = 0; t < k; ++t) {
            theta_r[t] = f0 * theta[t];
            delta[t] = (f1 - f0) * theta[t];
        }
        McmcParams rung_params = params;
        rung_params.seed = derive_seed(params.seed, 100000 + r);
        SampleResult res =
            sample_networks(model, theta_r, rung_params, &g, /*keep_graphs=*/false);
        require_healthy_sampling(res.diagnostics);
        std::vector<double> exponents(static_cast<std::size_t>(res.statistics.rows()));
        for (Eigen::Index row = 0; row < res.statistics.rows(); ++row) {
            double e = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                e += delta[t] * res.statistics(row, static_cast<Eigen::Index>(t));
            exponents[static_cast<std::size_t>(row)] = e;
        }
        log_k += logsumexp(exponents) - std::log(static_cast<double>(exponents.size()));
    }
    return log_k;
}

} // namespace detail

// Geyer-Thompson MCMC maximum likelihood: Newton updates on simulated
// moments, initialized at the maximum pseudo-likelihood estimate. After the
// stopping rule fires, one more update from an enlarged sample sharpens the
// estimate and supplies the covariance for the standard errors.
inline ErgmFit mcmc_mle(const Graph& g, const ErgmModel& model, const McmcParams& params,
                        const EstimationOptions& options = {})
{
    detail::check_model_graph(g, model);
    model.require_bound();
    params.validate();
    if (g.edge_count() == 0 || g.edge_count() == g.dyad_count())
        throw estimation_error("mcmc_mle: observed graph is empty or complete, the MLE "
                               "lies on the boundary");

    const std::size_t k = model.term_count();
    std::vector<double> theta = mple(g, model);
    const std::vector<double> z_obs_v = compute_statistics(g, model);
    Eigen::Map<const Eigen::VectorXd> z_obs(z_obs_v.data(), static_cast<Eigen::Index>(k));

    ErgmFit fit;
    fit.term_names = model.term_names();
    fit.term_labels = model.term_labels();
    fit.n_nodes = model.node_count();
    fit.n_terms = k;
    fit.n_dyads = model.dyad_count();
    fit.observed_stats = z_obs_v;
    fit.seed = params.seed;
    fit.dyad_independent = model.dyad_independent();

    std::string last_diag;
    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;
        McmcParams iter_params = params;
        iter_params.seed = derive_seed(params.seed, iter);
        SampleResult res = sample_networks(model, theta, iter_params, &g, false);
        require_healthy_sampling(res.diagnostics);

        Eigen::VectorXd zbar = detail::column_means(res.statistics);
        Eigen::MatrixXd c = detail::sample_covariance(res.statistics);
        Eigen::VectorXd d = z_obs - zbar;

        double worst = 0.0;
        for (Eigen::Index t = 0; t < d.size(); ++t) {
            const double sd = std::sqrt(std::max(c(t, t), 1e-24));
            worst = std::max(worst, std::abs(d(t)) / sd);
        }
        last_diag = "max standardized difference " + format_fixed(worst, 4) + " after " +
                    std::to_string(iter) + " iterations";
        if (worst < options.tolerance) {
            fit.converged = true;
            break;
        }

        Eigen::VectorXd step = detail::solve_spd(c, d);
        const double biggest = step.cwiseAbs().maxCoeff();
        if (biggest > options.max_step)
            step *= options.max_step / biggest;
        for (std::size_t t = 0; t < k; ++t)
            theta[t] += step(static_cast<Eigen::Index>(t));
    }
    if (!fit.converged)
        throw estimation_error("mcmc_mle: no convergence (" + last_diag + ")");

    // polishing pass: larger sample, one Newton update, standard errors
    McmcParams polish = params;
    polish.sample_size = params.sample_size * options.polish_factor;
    polish.seed = derive_seed(params.seed, 999999);
    SampleResult res = sample_networks(model, theta, polish, &g, false);
    require_healthy_sampling(res.diagnostics);
    Eigen::VectorXd zbar = detail::column_means(res.statistics);
    Eigen::MatrixXd c = detail::sample_covariance(res.statistics);
    Eigen::VectorXd step = detail::solve_spd(c, z_obs - zbar);
    const double biggest = step.cwiseAbs().maxCoeff();
    if (biggest > options.max_step)
        step *= options.max_step / biggest;
    for (std::size_t t = 0; t < k; ++t)
        theta[t] += step(static_cast<Eigen::Index>(t));

    fit.theta = theta;
    fit.sim_mean.assign(zbar.data(), zbar.data() + zbar.size());
    fit.acceptance_rate = res.diagnostics.acceptance_rate();
    fit.ess_proxy = detail::min_lag1_ess(res.statistics);

    Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                                         static_cast<Eigen::Index>(k));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
    Eigen::MatrixXd cinv = ldlt.solve(identity);
    if (ldlt.info() != Eigen::Success || !cinv.allFinite())
        throw estimation_error("mcmc_mle: covariance not invertible at the estimate");
    fit.std_errors.resize(k);
    fit.z_scores.resize(k);
    fit.p_values.resize(k);
    fit.stars.resize(k);
    for (std::size_t t = 0; t < k; ++t) {
        const Eigen::Index e = static_cast<Eigen::Index>(t);
        if (cinv(e, e) <= 0.0)
            throw estimation_error("mcmc_mle: non-positive variance estimate for term " +
                                   fit.term_names[t]);
        fit.std_errors[t] = std::sqrt(cinv(e, e));
        fit.z_scores[t] = fit.theta[t] / fit.std_errors[t];
        fit.p_values[t] = normal_p_value(fit.z_scores[t]);
        fit.stars[t] = significance_stars(fit.p_values[t]);
    }

    if (options.compute_log_likelihood) {
        if (fit.dyad_independent) {
            fit.log_likelihood = dyad_independent_log_likelihood(g, model, fit.theta);
        } else {
            double dot = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                dot += fit.theta[t] * z_obs_v[t];
            fit.log_likelihood =
                dot - detail::bridge_log_k(g, model, fit.theta, params, options.bridge_rungs);
        }
        fit.aic = aic(k, fit.log_likelihood);
        fit.bic = bic(k, fit.log_likelihood, fit.n_dyads);
    }
    return fit;
}

} // namespace iftnet
