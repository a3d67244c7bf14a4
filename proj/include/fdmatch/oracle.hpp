#pragma once

#include "fdmatch/instance.hpp"

#include <cstdint>
#include <vector>

namespace fdmatch {

/// Final graph of a stream, for offline optimum computations.
struct OfflineGraph {
    std::size_t vertices = 0;
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<Rational> weights; ///< empty when unweighted

    static OfflineGraph from_stream(const InstanceStream& s)
    {
        OfflineGraph g;
        g.vertices = s.vertex_count();
        for (const auto& ev : s.events) {
            g.edges.emplace_back(ev.u, ev.v);
            g.vertices = std::max<std::size_t>(g.vertices, std::max(ev.u.value, ev.v.value) + 1);
        }
        if (s.weighted) g.weights = s.weights();
        return g;
    }
};

namespace detail {

/// Rooted DP per component (root = lowest vertex id), iterative post-order.
/// a[v]: best in v's subtree with v unmatched; b[v]: best overall in the subtree.
template <class Value, class WeightOf>
Value forest_matching_dp(const OfflineGraph& g, WeightOf weight_of)
{
    std::size_t n = g.vertices;
    std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> adj(n);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        auto [u, v] = g.edges[i];
        if (u == v) throw ModelViolation("self-loop");
        adj[u.value].emplace_back(v.value, i);
        adj[v.value].emplace_back(u.value, i);
    }
    std::vector<Value> a(n), b(n);
    std::vector<char> seen(n, 0);
    std::vector<std::int64_t> parent_edge(n, -1);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    Value total{};
    for (std::uint32_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        order.clear();
        std::vector<std::uint32_t> stack{root};
        seen[root] = 1;
        while (!stack.empty()) {
            std::uint32_t v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (auto [w, ei] : adj[v]) {
                if (static_cast<std::int64_t>(ei) == parent_edge[v]) continue;
                if (seen[w]) throw ModelViolation("graph has a cycle");
                seen[w] = 1;
                parent_edge[w] = static_cast<std::int64_t>(ei);
                stack.push_back(w);
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            std::uint32_t v = *it;
            Value sum_b{};
            for (auto [w, ei] : adj[v])
                if (static_cast<std::int64_t>(ei) != parent_edge[v]) sum_b = sum_b + b[w];
            a[v] = sum_b;
            Value best = sum_b;
            for (auto [w, ei] : adj[v]) {
                if (static_cast<std::int64_t>(ei) == parent_edge[v]) continue;
                Value cand = sum_b - b[w] + a[w] + weight_of(ei);
                if (best < cand) best = cand;
            }
            b[v] = best;
        }
        total = total + b[root];
    }
    return total;
}

} // namespace detail

inline std::size_t max_cardinality_forest(const OfflineGraph& g)
{
    return detail::forest_matching_dp<std::size_t>(g, [](std::size_t) { return std::size_t{1}; });
}

inline Rational max_weight_forest(const OfflineGraph& g)
{
    return detail::forest_matching_dp<Rational>(
        g, [&](std::size_t i) { return g.weights.empty() ? Rational(1) : g.weights[i]; });
}

/// Exhaustive search over edge subsets; works on any graph with at most 16 edges.
inline Rational brute_force(const OfflineGraph& g)
{
    constexpr std::size_t limit = 16;
    if (g.edges.size() > limit) throw SizeLimit("brute force is limited to 16 edges");
    Rational best;
    std::size_t m = g.edges.size();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<bool> busy(g.vertices, false);
        bool ok = true;
        Rational value;
        for (std::size_t i = 0; i < m && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            auto [u, v] = g.edges[i];
            if (busy[u.value] || busy[v.value]) ok = false;
            busy[u.value] = busy[v.value] = true;
            value += g.weights.empty() ? Rational(1) : g.weights[i];
        }
        if (ok && value > best) best = value;
    }
    return best;
}

/// Offline optimum for a stream: weighted DP when weighted, cardinality otherwise.
inline Rational offline_optimum(const InstanceStream& s)
{
    auto g = OfflineGraph::from_stream(s);
    if (s.weighted) return max_weight_forest(g);
    return Rational(max_cardinality_forest(g));
}

} // namespace fdmatch
