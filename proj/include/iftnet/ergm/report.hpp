#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "iftnet/csv.hpp"
#include "iftnet/ergm/estimation.hpp"

namespace iftnet {

struct FitReportRow {
    std::string label;
    std::string value; // "3.2163*** (0.1081)" or a bare number for footer rows
};

// Table-style rows: one per term, then the information criteria footer.
inline std::vector<FitReportRow> format_fit(const ErgmFit& fit)
{
    std::vector<FitReportRow> rows;
    rows.reserve(fit.n_terms + 3);
    for (std::size_t t = 0; t < fit.n_terms; ++t)
        rows.push_back({fit.term_labels[t], format_fixed(fit.theta[t], 4) + fit.stars[t] +
                                                " (" + format_fixed(fit.std_errors[t], 4) +
                                                ")"});
    rows.push_back({"AIC", format_fixed(fit.aic, 4)});
    rows.push_back({"BIC", format_fixed(fit.bic, 4)});
    rows.push_back({"Log Likelihood", format_fixed(fit.log_likelihood, 4)});
    return rows;
}

inline void write_fit_csv(const ErgmFit& fit, const std::string& path,
                          const std::string& config_hash = "")
{
    CsvWriter w(path);
    w.stage_comment("fit", config_hash);
    w.raw_line("term,estimate,std_error,z,p,stars");
    for (std::size_t t = 0; t < fit.n_terms; ++t)
        w.row({fit.term_labels[t], format_fixed(fit.theta[t], 4),
               format_fixed(fit.std_errors[t], 4), format_fixed(fit.z_scores[t], 4),
               format_fixed(fit.p_values[t], 4), fit.stars[t]});
    w.row({"AIC", format_fixed(fit.aic, 4), "", "", "", ""});
    w.row({"BIC", format_fixed(fit.bic, 4), "", "", "", ""});
    w.row({"Log Likelihood", format_fixed(fit.log_likelihood, 4), "", "", "", ""});
    w.close();
}

inline nlohmann::json fit_to_json(const ErgmFit& fit)
{
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t t = 0; t < fit.n_terms; ++t) {
        terms.push_back({{"name", fit.term_names[t]},
                         {"label", fit.term_labels[t]},
                         {"estimate", fit.theta[t]},
                         {"std_error", fit.std_errors[t]},
                         {"z", fit.z_scores[t]},
                         {"p", fit.p_values[t]},
                         {"stars", fit.stars[t]},
                         {"observed_stat", fit.observed_stats[t]},
                         {"simulated_mean", fit.sim_mean[t]}});
    }
    return {{"terms", terms},
            {"log_likelihood", fit.log_likelihood},
            {"aic", fit.aic},
            {"bic", fit.bic},
            {"n_nodes", fit.n_nodes},
            {"n_terms", fit.n_terms},
            {"n_dyads", fit.n_dyads},
            {"seed", fit.seed},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"dyad_independent", fit.dyad_independent},
            {"acceptance_rate", fit.acceptance_rate},
            {"ess_proxy", fit.ess_proxy}};
}

inline void write_fit_json(const ErgmFit& fit, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << fit_to_json(fit).dump(2) << "\n";
    if (!out)
        throw io_error("write failed for '" + path + "'");
}

} // namespace iftnet
