#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "iftnet/ergm/statistics.hpp"

namespace iftnet {

namespace detail {

// Change statistics of every dyad at the observed graph, stacked as rows,
// with the edge indicators alongside: the pseudo-likelihood design.
inline void pseudolikelihood_design(const Graph& g, const ErgmModel& model, Eigen::MatrixXd& X,
                                    Eigen::VectorXd& y)
{
    const std::size_t n = g.node_count();
    const std::size_t k = model.term_count();
    X.resize(static_cast<Eigen::Index>(g.dyad_count()), static_cast<Eigen::Index>(k));
    y.resize(static_cast<Eigen::Index>(g.dyad_count()));
    ChangeStatWorkspace ws;
    std::vector<double> delta(k);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++r) {
            change_statistics(g, model, i, j, delta.data(), ws);
            for (std::size_t t = 0; t < k; ++t)
                X(r, static_cast<Eigen::Index>(t)) = delta[t];
            y(r) = g.has_edge(i, j) ? 1.0 : 0.0;
        }
    }
}

} // namespace detail

// Maximum pseudo-likelihood: logistic regression of edge indicators on the
// observed change statistics, by Newton iteration. Exact MLE whenever the
// model is dyad-independent.
inline std::vector<double> mple(const Graph& g, const ErgmModel& model)
{
    detail::check_model_graph(g, model);
    model.require_bound();
    const std::size_t k = model.term_count();
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    detail::pseudolikelihood_design(g, model, X, y);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < static_cast<Eigen::Index>(k))
        throw estimation_error(
            "mple: change-statistic columns are collinear, model not identifiable");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    const int max_iter = 100;
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd p(eta.size()), w(eta.size());
        for (Eigen::Index r = 0; r < eta.size(); ++r) {
            const double pr = 1.0 / (1.0 + std::exp(-eta(r)));
            p(r) = pr;
            w(r) = pr * (1.0 - pr);
        }
        Eigen::VectorXd grad = X.transpose() * (y - p);
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() != Eigen::Success)
            throw estimation_error("mple: singular Hessian (quasi-separation likely)");
        Eigen::VectorXd step = ldlt.solve(grad);
        if (!step.allFinite())
            throw estimation_error("mple: non-finite Newton step");
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-10) {
            converged = true;
            break;
        }
        if (beta.cwiseAbs().maxCoeff() > 30.0)
            throw estimation_error(
                "mple: separation detected (coefficient diverging), data too sparse "
                "for this model");
    }
    if (!converged)
        throw estimation_error("mple: Newton iteration did not converge");

    return {beta.data(), beta.data() + beta.size()};
}

// Exact log-likelihood of a dyad-independent model: the dyads are
// independent Bernoulli variables with logits given by the (state-free)
// change statistics.
inline double dyad_independent_log_likelihood(const Graph& g, const ErgmModel& model,
                                              const std::vector<double>& theta)
{
    if (!model.dyad_independent())
        throw estimation_error("exact log-likelihood needs a dyad-independent model");
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    detail::pseudolikelihood_design(g, model, X, y);
    Eigen::Map<const Eigen::VectorXd> th(theta.data(),
                                         static_cast<Eigen::Index>(theta.size()));
    Eigen::VectorXd eta = X * th;
    double ll = 0.0;
    for (Eigen::Index r = 0; r < eta.size(); ++r) {
        // log(1 + e^eta), stable on both tails
        const double a = eta(r);
        const double softplus = a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
        ll += y(r) * a - softplus;
    }
    return ll;
}

} // namespace iftnet
