#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iftnet/common.hpp"

namespace iftnet {

// Simple graphs over opaque string node keys. Keys are sorted and mapped to
// dense indices at construction; every query and report speaks sorted-key
// order so outputs are reproducible. Adjacency is a packed bit matrix, one
// row of 64-bit words per node, which keeps neighbourhood intersections
// (shared-partner counts) at popcount speed for the sampler.
enum class EdgeMode { undirected, directed };

class Graph {
public:
    Graph() : Graph(EdgeMode::undirected, {}) {}

    Graph(EdgeMode mode, std::vector<std::string> node_ids)
        : mode_(mode), ids_(std::move(node_ids))
    {
        std::sort(ids_.begin(), ids_.end());
        if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
            throw validation_error("Graph: duplicate node id");
        words_ = (ids_.size() + 63) / 64;
        adj_.assign(ids_.size() * words_, 0);
    }

    // index-labelled graph ("v000", "v001", ...) for simulation work
    static Graph indexed(EdgeMode mode, std::size_t n)
    {
        std::vector<std::string> ids;
        ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "v%03zu", i);
            ids.emplace_back(buf);
        }
        return Graph(mode, std::move(ids));
    }

    EdgeMode mode() const { return mode_; }
    bool undirected() const { return mode_ == EdgeMode::undirected; }
    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t dyad_count() const { return ids_.size() * (ids_.size() - 1) / 2; }
    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::string& id_of(std::size_t i) const { return ids_.at(i); }

    std::size_t index_of(const std::string& id) const
    {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw validation_error("Graph: unknown node id '" + id + "'");
        return static_cast<std::size_t>(it - ids_.begin());
    }

    bool contains(const std::string& id) const
    {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        return it != ids_.end() && *it == id;
    }

    bool has_edge(std::size_t i, std::size_t j) const
    {
        check_pair(i, j);
        return bit(i, j);
    }

    bool has_edge(const std::string& a, const std::string& b) const
    {
        return has_edge(index_of(a), index_of(b));
    }

    void set_edge(std::size_t i, std::size_t j, bool present)
    {
        check_pair(i, j);
        if (i == j)
            throw validation_error("Graph: self-loop rejected on node '" + ids_[i] + "'");
        const bool had = bit(i, j);
        if (had == present)
            return;
        flip_bit(i, j);
        if (undirected())
            flip_bit(j, i);
        edge_count_ += present ? 1 : -1;
    }

    void add_edge(std::size_t i, std::size_t j) { set_edge(i, j, true); }
    void add_edge(const std::string& a, const std::string& b)
    {
        set_edge(index_of(a), index_of(b), true);
    }

    void toggle(std::size_t i, std::size_t j) { set_edge(i, j, !bit(i, j)); }

    // undirected neighbour count; directed graphs expose in/out degrees
    std::size_t degree(std::size_t v) const
    {
        require_undirected("degree");
        check_node(v);
        return row_popcount(v);
    }

    std::size_t degree(const std::string& id) const { return degree(index_of(id)); }

    std::size_t out_degree(std::size_t v) const
    {
        check_node(v);
        return row_popcount(v);
    }

    std::size_t in_degree(std::size_t v) const
    {
        check_node(v);
        std::size_t c = 0;
        for (std::size_t u = 0; u < ids_.size(); ++u)
            if (u != v && bit(u, v))
                ++c;
        return c;
    }

    // |N(i) ∩ N(j)|; the intersection can never contain i or j themselves
    std::size_t shared_partners(std::size_t i, std::size_t j) const
    {
        require_undirected("shared_partners");
        check_pair(i, j);
        if (i == j)
            throw validation_error("shared_partners: i and j must differ");
        std::size_t c = 0;
        const std::uint64_t* ri = row(i);
        const std::uint64_t* rj = row(j);
        for (std::size_t w = 0; w < words_; ++w)
            c += static_cast<std::size_t>(std::popcount(ri[w] & rj[w]));
        return c;
    }

    std::size_t shared_partners(const std::string& a, const std::string& b) const
    {
        return shared_partners(index_of(a), index_of(b));
    }

    std::vector<std::size_t> neighbors(std::size_t v) const
    {
        check_node(v);
        std::vector<std::size_t> out;
        const std::uint64_t* r = row(v);
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = r[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                out.push_back(w * 64 + static_cast<std::size_t>(b));
                bits &= bits - 1;
            }
        }
        return out;
    }

    // maximal connected sets, sorted by node index; isolates are singletons
    std::vector<std::vector<std::size_t>> connected_components() const
    {
        require_undirected("connected_components");
        const std::size_t n = ids_.size();
        std::vector<std::vector<std::size_t>> comps;
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack;
        for (std::size_t s = 0; s < n; ++s) {
            if (seen[s])
                continue;
            std::vector<std::size_t> comp;
            stack.assign(1, s);
            seen[s] = true;
            while (!stack.empty()) {
                const std::size_t v = stack.back();
                stack.pop_back();
                comp.push_back(v);
                for (std::size_t u : neighbors(v)) {
                    if (!seen[u]) {
                        seen[u] = true;
                        stack.push_back(u);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        return comps;
    }

    struct GeodesicHistogram {
        std::map<std::size_t, std::uint64_t> finite; // path length -> pair count
        std::uint64_t unreachable = 0;               // the ∞ bucket

        std::uint64_t total() const
        {
            std::uint64_t t = unreachable;
            for (const auto& [len, c] : finite)
                t += c;
            return t;
        }
    };

    // shortest-path length histogram over all unordered pairs (BFS per source)
    GeodesicHistogram geodesic_distribution() const
    {
        require_undirected("geodesic_distribution");
        const std::size_t n = ids_.size();
        GeodesicHistogram hist;
        std::vector<std::size_t> dist(n);
        std::vector<std::size_t> queue(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::fill(dist.begin(), dist.end(), SIZE_MAX);
            dist[s] = 0;
            std::size_t head = 0, tail = 0;
            queue[tail++] = s;
            while (head < tail) {
                const std::size_t v = queue[head++];
                for (std::size_t u : neighbors(v)) {
                    if (dist[u] == SIZE_MAX) {
                        dist[u] = dist[v] + 1;
                        queue[tail++] = u;
                    }
                }
            }
            for (std::size_t t = s + 1; t < n; ++t) {
                if (dist[t] == SIZE_MAX)
                    ++hist.unreachable;
                else
                    ++hist.finite[dist[t]];
            }
        }
        return hist;
    }

    // collapse a directed graph onto its undirected support
    Graph undirected_copy() const
    {
        Graph g(EdgeMode::undirected, ids_);
        for (std::size_t i = 0; i < ids_.size(); ++i)
            for (std::size_t j = i + 1; j < ids_.size(); ++j)
                if (bit(i, j) || bit(j, i))
                    g.set_edge(i, j, true);
        return g;
    }

    // induced subgraph on a subset of node indices
    Graph induced(const std::vector<std::size_t>& keep) const
    {
        std::vector<std::string> ids;
        ids.reserve(keep.size());
        for (std::size_t v : keep)
            ids.push_back(ids_.at(v));
        Graph g(mode_, ids);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b)
                if (a != b && bit(keep[a], keep[b]))
                    g.set_edge(g.index_of(ids_[keep[a]]), g.index_of(ids_[keep[b]]), true);
        return g;
    }

    // undirected edges as (i, j) index pairs with i < j, sorted
    std::vector<std::pair<std::size_t, std::size_t>> edges() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        out.reserve(edge_count_);
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            for (std::size_t j = undirected() ? i + 1 : 0; j < ids_.size(); ++j) {
                if (i != j && bit(i, j))
                    out.emplace_back(i, j);
            }
        }
        return out;
    }

    const std::uint64_t* row(std::size_t v) const { return adj_.data() + v * words_; }
    std::size_t words_per_row() const { return words_; }

    bool operator==(const Graph& other) const
    {
        return mode_ == other.mode_ && ids_ == other.ids_ && adj_ == other.adj_;
    }

private:
    void check_node(std::size_t v) const
    {
        if (v >= ids_.size())
            throw validation_error("Graph: node index out of range");
    }

    void check_pair(std::size_t i, std::size_t j) const
    {
        check_node(i);
        check_node(j);
    }

    void require_undirected(const char* op) const
    {
        if (!undirected())
            throw validation_error(std::string(op) + ": requires an undirected graph");
    }

    bool bit(std::size_t i, std::size_t j) const
    {
        return (adj_[i * words_ + j / 64] >> (j % 64)) & 1;
    }

    void flip_bit(std::size_t i, std::size_t j)
    {
        adj_[i * words_ + j / 64] ^= (std::uint64_t{1} << (j % 64));
    }

    std::size_t row_popcount(std::size_t v) const
    {
        std::size_t c = 0;
        const std::uint64_t* r = row(v);
        for (std::size_t w = 0; w < words_; ++w)
            c += static_cast<std::size_t>(std::popcount(r[w]));
        return c;
    }

    EdgeMode mode_;
    std::vector<std::string> ids_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> adj_;
    std::size_t edge_count_ = 0;
};

// Firms on the left, countries on the right. Stored as incidence bit rows
// per left node plus reverse lists for per-country queries.
class BipartiteGraph {
public:
    BipartiteGraph() : BipartiteGraph({}, {}) {}

    BipartiteGraph(std::vector<std::string> left_ids, std::vector<std::string> right_ids)
        : left_(std::move(left_ids)), right_(std::move(right_ids))
    {
        std::sort(left_.begin(), left_.end());
        std::sort(right_.begin(), right_.end());
        if (std::adjacent_find(left_.begin(), left_.end()) != left_.end())
            throw validation_error("BipartiteGraph: duplicate left id");
        if (std::adjacent_find(right_.begin(), right_.end()) != right_.end())
            throw validation_error("BipartiteGraph: duplicate right id");
        words_ = (right_.size() + 63) / 64;
        inc_.assign(left_.size() * words_, 0);
        right_lists_.assign(right_.size(), {});
    }

    std::size_t left_count() const { return left_.size(); }
    std::size_t right_count() const { return right_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<std::string>& left_ids() const { return left_; }
    const std::vector<std::string>& right_ids() const { return right_; }

    std::size_t left_index(const std::string& id) const { return find(left_, id, "left"); }
    std::size_t right_index(const std::string& id) const { return find(right_, id, "right"); }
    bool contains_left(const std::string& id) const { return probe(left_, id); }
    bool contains_right(const std::string& id) const { return probe(right_, id); }

    void add_edge(std::size_t l, std::size_t r)
    {
        if (l >= left_.size() || r >= right_.size())
            throw validation_error("BipartiteGraph: index out of range");
        if (has_edge(l, r))
            return;
        inc_[l * words_ + r / 64] |= (std::uint64_t{1} << (r % 64));
        right_lists_[r].push_back(l);
        std::sort(right_lists_[r].begin(), right_lists_[r].end());
        ++edge_count_;
    }

    bool has_edge(std::size_t l, std::size_t r) const
    {
        return (inc_[l * words_ + r / 64] >> (r % 64)) & 1;
    }

    std::vector<std::size_t> left_neighbors(std::size_t l) const
    {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = inc_[l * words_ + w];
            while (bits) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    const std::vector<std::size_t>& right_neighbors(std::size_t r) const
    {
        return right_lists_.at(r);
    }

    std::size_t left_degree(std::size_t l) const
    {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w)
            c += static_cast<std::size_t>(std::popcount(inc_[l * words_ + w]));
        return c;
    }

    bool operator==(const BipartiteGraph& other) const
    {
        return left_ == other.left_ && right_ == other.right_ && inc_ == other.inc_;
    }

private:
    static std::size_t find(const std::vector<std::string>& ids, const std::string& id,
                            const char* side)
    {
        auto it = std::lower_bound(ids.begin(), ids.end(), id);
        if (it == ids.end() || *it != id)
            throw validation_error(std::string("BipartiteGraph: unknown ") + side + " id '" +
                                   id + "'");
        return static_cast<std::size_t>(it - ids.begin());
    }

    static bool probe(const std::vector<std::string>& ids, const std::string& id)
    {
        auto it = std::lower_bound(ids.begin(), ids.end(), id);
        return it != ids.end() && *it == id;
    }

    std::vector<std::string> left_, right_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> inc_;
    std::vector<std::vector<std::size_t>> right_lists_;
    std::size_t edge_count_ = 0;
};

} // namespace iftnet
