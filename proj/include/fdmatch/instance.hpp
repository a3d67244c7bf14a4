#pragma once

#include "fdmatch/errors.hpp"
#include "fdmatch/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace fdmatch {

struct VertexId {
    std::uint32_t value = 0;
    friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

/// Edges are numbered by arrival; `index` is 0-based, the arrival time t is index + 1.
struct EdgeId {
    std::uint32_t index = 0;
    std::uint32_t arrival() const { return index + 1; }
    friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

enum class ArrivalModel { GrowingTree, Forest, General };

inline const char* model_name(ArrivalModel m)
{
    switch (m) {
    case ArrivalModel::GrowingTree: return "growing-tree";
    case ArrivalModel::Forest: return "forest";
    case ArrivalModel::General: return "general";
    }
    return "?";
}

struct ArrivalEvent {
    VertexId u;
    VertexId v;
    std::optional<Rational> weight;
    friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

struct InstanceStream {
    ArrivalModel model = ArrivalModel::General;
    bool weighted = false;
    std::vector<ArrivalEvent> events;
    /// Human-readable vertex names, indexed by VertexId.
    std::vector<std::string> names;

    std::size_t vertex_count() const { return names.size(); }
    std::size_t edge_count() const { return events.size(); }
    const std::string& name(VertexId v) const { return names.at(v.value); }
    Rational weight(EdgeId e) const
    {
        const auto& w = events.at(e.index).weight;
        return w ? *w : Rational(1);
    }
    std::vector<Rational> weights() const
    {
        std::vector<Rational> out;
        out.reserve(events.size());
        for (const auto& ev : events) out.push_back(ev.weight ? *ev.weight : Rational(1));
        return out;
    }

    friend bool operator==(const InstanceStream&, const InstanceStream&) = default;
};

/// Interns vertex names and appends events; used by generators and the parser.
class StreamBuilder {
public:
    StreamBuilder(ArrivalModel model, bool weighted)
    {
        stream_.model = model;
        stream_.weighted = weighted;
    }

    VertexId vertex(const std::string& name)
    {
        auto [it, inserted] = ids_.try_emplace(name, VertexId{static_cast<std::uint32_t>(stream_.names.size())});
        if (inserted) stream_.names.push_back(name);
        return it->second;
    }

    void edge(VertexId u, VertexId v, std::optional<Rational> weight = std::nullopt)
    {
        stream_.events.push_back({u, v, std::move(weight)});
    }

    void edge(const std::string& u, const std::string& v, std::optional<Rational> weight = std::nullopt)
    {
        auto a = vertex(u);
        auto b = vertex(v);
        edge(a, b, std::move(weight));
    }

    const InstanceStream& peek() const { return stream_; }
    InstanceStream build() && { return std::move(stream_); }

private:
    InstanceStream stream_;
    std::unordered_map<std::string, VertexId> ids_;
};

struct IsolatedEdge {
    friend bool operator==(const IsolatedEdge&, const IsolatedEdge&) = default;
};
struct GrowingEdge {
    VertexId parent;
    VertexId child;
    friend bool operator==(const GrowingEdge&, const GrowingEdge&) = default;
};
/// Merge where one side is a single edge; that edge is `isolated_edge`.
struct TrivialMerge {
    EdgeId isolated_edge;
    friend bool operator==(const TrivialMerge&, const TrivialMerge&) = default;
};
struct NonTrivialMerge {
    friend bool operator==(const NonTrivialMerge&, const NonTrivialMerge&) = default;
};

using EdgeKind = std::variant<IsolatedEdge, GrowingEdge, TrivialMerge, NonTrivialMerge>;

inline bool is_merge(const EdgeKind& k)
{
    return std::holds_alternative<TrivialMerge>(k) || std::holds_alternative<NonTrivialMerge>(k);
}

inline const char* kind_name(const EdgeKind& k)
{
    switch (k.index()) {
    case 0: return "isolated";
    case 1: return "growing";
    case 2: return "trivial-merge";
    default: return "merge";
    }
}

/// Union-find with union by size. `find` does not compress so it stays const.
class DisjointSets {
public:
    void grow(std::size_t n)
    {
        while (parent_.size() < n) {
            parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
            size_.push_back(1);
            edges_.push_back(0);
        }
    }

    std::uint32_t find(std::uint32_t x) const
    {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }

    /// Joins the sets of a and b and counts one more edge in the result.
    std::uint32_t join_with_edge(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            if (size_[a] < size_[b]) std::swap(a, b);
            parent_[b] = a;
            size_[a] += size_[b];
            edges_[a] += edges_[b];
        }
        edges_[a] += 1;
        return a;
    }

    std::size_t edges_in(std::uint32_t x) const { return edges_[find(x)]; }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::size_t> edges_;
};

/// Incrementally built acyclic graph with component tracking; classifies
/// arriving edges against the current prefix.
class ForestGraph {
public:
    void ensure_vertex(VertexId v)
    {
        if (v.value >= incident_.size()) {
            incident_.resize(v.value + 1);
            sets_.grow(v.value + 1);
        }
    }

    std::size_t vertex_count() const { return incident_.size(); }
    std::size_t edge_count() const { return ends_.size(); }
    std::size_t degree(VertexId v) const { return v.value < incident_.size() ? incident_[v.value].size() : 0; }
    std::span<const EdgeId> incident(VertexId v) const
    {
        if (v.value >= incident_.size()) return {};
        return incident_[v.value];
    }
    std::pair<VertexId, VertexId> endpoints(EdgeId e) const { return ends_.at(e.index); }
    VertexId other(EdgeId e, VertexId v) const
    {
        auto [a, b] = ends_.at(e.index);
        return a == v ? b : a;
    }
    bool has_edge(VertexId a, VertexId b) const { return pairs_.contains(key(a, b)); }

    std::uint32_t component(VertexId v) const { return sets_.find(v.value); }
    std::size_t component_edges(VertexId v) const { return v.value < sets_.size() ? sets_.edges_in(v.value) : 0; }

    EdgeKind classify(VertexId u, VertexId v) const
    {
        if (u == v) throw ModelViolation("self-loop");
        if (has_edge(u, v)) throw ModelViolation("duplicate edge");
        std::size_t du = degree(u);
        std::size_t dv = degree(v);
        if (du == 0 && dv == 0) return IsolatedEdge{};
        if (du == 0) return GrowingEdge{v, u};
        if (dv == 0) return GrowingEdge{u, v};
        if (component(u) == component(v)) throw ModelViolation("edge closes a cycle");
        if (component_edges(u) == 1) return TrivialMerge{incident_[u.value].front()};
        if (component_edges(v) == 1) return TrivialMerge{incident_[v.value].front()};
        return NonTrivialMerge{};
    }

    /// Adds the edge without acyclicity checks (callers classify first).
    EdgeId add(VertexId u, VertexId v)
    {
        ensure_vertex(u);
        ensure_vertex(v);
        EdgeId id{static_cast<std::uint32_t>(ends_.size())};
        ends_.emplace_back(u, v);
        incident_[u.value].push_back(id);
        incident_[v.value].push_back(id);
        pairs_.insert(key(u, v));
        sets_.join_with_edge(u.value, v.value);
        return id;
    }

private:
    static std::pair<std::uint32_t, std::uint32_t> key(VertexId a, VertexId b)
    {
        return std::minmax(a.value, b.value);
    }

    std::vector<std::vector<EdgeId>> incident_;
    std::vector<std::pair<VertexId, VertexId>> ends_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    DisjointSets sets_;
};

inline EdgeKind classify_event(const ForestGraph& prefix, const ArrivalEvent& ev)
{
    return prefix.classify(ev.u, ev.v);
}

struct ValidationReport {
    bool ok = true;
    std::size_t event_index = 0; ///< 1-based index of the first offending event
    std::string reason;
};

inline ValidationReport validate_model(const InstanceStream& stream)
{
    ForestGraph graph;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const auto& ev = stream.events[i];
        auto fail = [&](std::string why) { return ValidationReport{false, i + 1, std::move(why)}; };
        if (ev.u == ev.v) return fail("self-loop");
        if (!seen.insert(std::minmax(ev.u.value, ev.v.value)).second) return fail("duplicate edge");
        if (stream.weighted != ev.weight.has_value()) return fail("weight presence does not match header");
        if (ev.weight && ev.weight->sign() <= 0) return fail("nonpositive weight");
        if (stream.model == ArrivalModel::General) continue;

        EdgeKind kind;
        try {
            kind = graph.classify(ev.u, ev.v);
        } catch (const ModelViolation& e) {
            return fail(e.what());
        }
        if (stream.model == ArrivalModel::GrowingTree && i > 0 && !std::holds_alternative<GrowingEdge>(kind))
            return fail("growing-tree event does not attach a new leaf to the tree (disconnected or merge)");
        graph.add(ev.u, ev.v);
    }
    return {};
}

} // namespace fdmatch
