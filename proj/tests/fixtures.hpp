#pragma once

#include "fdmatch/fdmatch.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace fixtures {

using namespace fdmatch;

inline InstanceStream stream(ArrivalModel model, const std::vector<std::pair<std::string, std::string>>& edges)
{
    StreamBuilder b(model, false);
    for (const auto& [u, v] : edges) b.edge(u, v);
    return std::move(b).build();
}

inline InstanceStream weighted(const std::vector<std::tuple<std::string, std::string, Rational>>& edges)
{
    StreamBuilder b(ArrivalModel::GrowingTree, true);
    for (const auto& [u, v, w] : edges) b.edge(u, v, w);
    return std::move(b).build();
}

inline InstanceStream path6()
{
    return stream(ArrivalModel::GrowingTree, {{"p0", "p1"}, {"p1", "p2"}, {"p2", "p3"}, {"p3", "p4"}, {"p4", "p5"}, {"p5", "p6"}});
}

/// Two 3-edge stars (centre b, leaves a c d), then leaf a merged with leaf a2.
inline InstanceStream two_leaves_merge()
{
    return stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"b", "d"}, {"a2", "b2"}, {"b2", "c2"}, {"b2", "d2"}, {"a", "a2"}});
}

/// Two 2-edge paths a-b-c, a2-b2-c2, then leaves c and c2 merged.
inline InstanceStream small_two_leaves_merge()
{
    return stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"a2", "b2"}, {"b2", "c2"}, {"c", "c2"}});
}

/// A leaf lifted into type B by a zero merge, later merged with a fresh leaf.
inline InstanceStream leaf_and_safe_b_merge()
{
    return stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"b", "d"}, {"x", "y"}, {"y", "z"}, {"a", "y"},
                                         {"p", "q"}, {"q", "r"}, {"p", "a"}});
}

/// The small two-leaf merge, then a fresh leaf r merged with the unsafe vertex c.
inline InstanceStream leaf_and_unsafe_b_merge()
{
    return stream(ArrivalModel::Forest,
                  {{"a", "b"}, {"b", "c"}, {"a2", "b2"}, {"b2", "c2"}, {"c", "c2"}, {"p", "q"}, {"q", "r"}, {"r", "c"}});
}

/// A 3-edge star and a lone edge x-y, joined by (y, c).
inline InstanceStream trivial_merge()
{
    return stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"b", "d"}, {"x", "y"}, {"y", "c"}});
}

/// Two lone edges a-b and c-d joined by (b, c).
inline InstanceStream lone_edges_merge()
{
    return stream(ArrivalModel::Forest, {{"a", "b"}, {"c", "d"}, {"b", "c"}});
}

inline ForestMatcher run_forest(const InstanceStream& s)
{
    ForestMatcher m;
    for (const auto& ev : s.events) m.arrive(ev);
    return m;
}

inline TreeMatcher run_tree(const InstanceStream& s)
{
    TreeMatcher m;
    for (const auto& ev : s.events) m.arrive(ev);
    return m;
}

inline VertexId id(const InstanceStream& s, const std::string& name)
{
    for (std::uint32_t i = 0; i < s.names.size(); ++i)
        if (s.names[i] == name) return VertexId{i};
    throw std::out_of_range("no vertex " + name);
}

/// Index of the edge {u, v} in arrival order.
inline EdgeId edge(const InstanceStream& s, const std::string& u, const std::string& v)
{
    VertexId a = id(s, u), b = id(s, v);
    for (std::uint32_t i = 0; i < s.events.size(); ++i) {
        const auto& ev = s.events[i];
        if ((ev.u == a && ev.v == b) || (ev.u == b && ev.v == a)) return EdgeId{i};
    }
    throw std::out_of_range("no edge " + u + "-" + v);
}

/// Every rooted labelled tree on `vertices` vertices, as parent arrays with parent[i] < i.
inline void for_each_parent_array(std::size_t vertices, const std::function<void(const std::vector<std::uint32_t>&)>& f)
{
    std::vector<std::uint32_t> parent(vertices, 0);
    while (true) {
        f(parent);
        std::size_t i = vertices;
        while (i-- > 1) {
            if (parent[i] + 1 < i) {
                ++parent[i];
                break;
            }
            parent[i] = 0;
        }
        if (i == 0) return;
    }
}

} // namespace fixtures
