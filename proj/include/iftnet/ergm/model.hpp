#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iftnet/common.hpp"

namespace iftnet {

enum class TermKind { edges, gw_degree, gwesp, gwdsp, activity, difference, edge_covariate };

inline std::string to_string(TermKind k)
{
    switch (k) {
    case TermKind::edges: return "edges";
    case TermKind::gw_degree: return "gw_degree";
    case TermKind::gwesp: return "gwesp";
    case TermKind::gwdsp: return "gwdsp";
    case TermKind::activity: return "activity";
    case TermKind::difference: return "difference";
    case TermKind::edge_covariate: return "edge_covariate";
    }
    throw error("unreachable term kind");
}

inline bool is_geometrically_weighted(TermKind k)
{
    return k == TermKind::gw_degree || k == TermKind::gwesp || k == TermKind::gwdsp;
}

// Dyad-independent terms have change statistics that do not depend on the
// rest of the graph, which makes the pseudo-likelihood exact.
inline bool is_dyad_independent(TermKind k)
{
    return k == TermKind::edges || k == TermKind::activity || k == TermKind::difference ||
           k == TermKind::edge_covariate;
}

struct TermSpec {
    TermKind kind = TermKind::edges;
    double decay = 0.0;    // geometrically weighted kinds only, fixed during estimation
    std::string attribute; // node attribute or dyad matrix name
    std::string label;     // report row name; name() when empty

    static TermSpec edges() { return {TermKind::edges, 0.0, "", "Edges"}; }
    static TermSpec gw_degree(double tau, std::string label = "Degree")
    {
        return {TermKind::gw_degree, tau, "", std::move(label)};
    }
    static TermSpec gwesp(double tau, std::string label = "GWESP")
    {
        return {TermKind::gwesp, tau, "", std::move(label)};
    }
    static TermSpec gwdsp(double tau, std::string label = "GWDSP")
    {
        return {TermKind::gwdsp, tau, "", std::move(label)};
    }
    static TermSpec activity(std::string attr, std::string label = "")
    {
        return {TermKind::activity, 0.0, std::move(attr), std::move(label)};
    }
    static TermSpec difference(std::string attr, std::string label = "")
    {
        return {TermKind::difference, 0.0, std::move(attr), std::move(label)};
    }
    static TermSpec edge_covariate(std::string matrix, std::string label = "")
    {
        return {TermKind::edge_covariate, 0.0, std::move(matrix), std::move(label)};
    }

    // unique key within a model
    std::string name() const
    {
        std::string n = to_string(kind);
        if (is_geometrically_weighted(kind))
            n += "(" + format_double(decay) + ")";
        else if (!attribute.empty())
            n += "(" + attribute + ")";
        return n;
    }

    std::string report_label() const { return label.empty() ? name() : label; }

    void validate() const
    {
        if (is_geometrically_weighted(kind)) {
            if (decay < 0.0)
                throw validation_error("term " + name() + ": negative decay");
            if (!attribute.empty())
                throw validation_error("term " + name() + ": unexpected attribute");
        } else {
            if (decay != 0.0)
                throw validation_error("term " + name() + ": decay on a non-weighted term");
            if (kind != TermKind::edges && attribute.empty())
                throw validation_error("term " + to_string(kind) + ": attribute required");
        }
    }

    bool operator==(const TermSpec&) const = default;
};

// A term list bound to a node set and its covariate data. Binding is checked
// lazily so structural models (edges, gw terms) need no covariates at all.
class ErgmModel {
public:
    ErgmModel() = default;

    ErgmModel(std::vector<TermSpec> terms, std::vector<std::string> node_ids)
        : terms_(std::move(terms)), node_ids_(std::move(node_ids))
    {
        if (terms_.empty())
            throw validation_error("ErgmModel: no terms");
        std::set<std::string> names;
        for (const auto& t : terms_) {
            t.validate();
            if (!names.insert(t.name()).second)
                throw validation_error("ErgmModel: duplicate term " + t.name());
        }
        std::sort(node_ids_.begin(), node_ids_.end());
        if (std::adjacent_find(node_ids_.begin(), node_ids_.end()) != node_ids_.end())
            throw validation_error("ErgmModel: duplicate node id");
    }

    static ErgmModel structural(std::vector<TermSpec> terms, std::size_t n)
    {
        std::vector<std::string> ids;
        ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "v%03zu", i);
            ids.emplace_back(buf);
        }
        return ErgmModel(std::move(terms), std::move(ids));
    }

    const std::vector<TermSpec>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    std::size_t node_count() const { return node_ids_.size(); }
    std::size_t dyad_count() const { return node_ids_.size() * (node_ids_.size() - 1) / 2; }

    bool dyad_independent() const
    {
        for (const auto& t : terms_)
            if (!is_dyad_independent(t.kind))
                return false;
        return true;
    }

    std::vector<std::string> term_names() const
    {
        std::vector<std::string> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back(t.name());
        return out;
    }

    std::vector<std::string> term_labels() const
    {
        std::vector<std::string> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back(t.report_label());
        return out;
    }

    void bind_attribute(const std::string& name, std::vector<double> values)
    {
        if (values.size() != node_ids_.size())
            throw validation_error("bind_attribute('" + name + "'): expected " +
                                   std::to_string(node_ids_.size()) + " values, got " +
                                   std::to_string(values.size()));
        attributes_[name] = std::move(values);
    }

    // row-major n*n, symmetric, zero diagonal
    void bind_dyad_matrix(const std::string& name, std::vector<double> m)
    {
        const std::size_t n = node_ids_.size();
        if (m.size() != n * n)
            throw validation_error("bind_dyad_matrix('" + name + "'): expected " +
                                   std::to_string(n * n) + " entries, got " +
                                   std::to_string(m.size()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (m[i * n + j] != m[j * n + i])
                    throw validation_error("bind_dyad_matrix('" + name + "'): not symmetric");
        matrices_[name] = std::move(m);
    }

    const std::vector<double>& attribute(const std::string& name) const
    {
        auto it = attributes_.find(name);
        if (it == attributes_.end())
            throw validation_error("missing covariate: node attribute '" + name + "' not bound");
        return it->second;
    }

    const std::vector<double>& dyad_matrix(const std::string& name) const
    {
        auto it = matrices_.find(name);
        if (it == matrices_.end())
            throw validation_error("missing covariate: dyad matrix '" + name + "' not bound");
        return it->second;
    }

    // every covariate referenced by a term resolves
    void require_bound() const
    {
        for (const auto& t : terms_) {
            if (t.kind == TermKind::activity || t.kind == TermKind::difference)
                attribute(t.attribute);
            else if (t.kind == TermKind::edge_covariate)
                dyad_matrix(t.attribute);
        }
    }

private:
    std::vector<TermSpec> terms_;
    std::vector<std::string> node_ids_;
    std::map<std::string, std::vector<double>> attributes_;
    std::map<std::string, std::vector<double>> matrices_;
};

} // namespace iftnet
