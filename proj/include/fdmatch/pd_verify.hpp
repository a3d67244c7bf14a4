#pragma once

#include "fdmatch/fracstate.hpp"

#include <concepts>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fdmatch {

/// Dual mass stored on an edge instead of a vertex.
struct UncertainDual {
    EdgeId edge;
    VertexId u;
    VertexId v;
    Rational value;
};

struct DualSnapshot {
    std::vector<Rational> alpha; ///< indexed by vertex
    std::vector<UncertainDual> uncertain;
    /// Component label per vertex, needed for per-component duality checks.
    std::optional<std::vector<std::uint32_t>> component;
    /// Components excluded from the per-component surplus check.
    std::set<std::uint32_t> exempt_components;

    const Rational& alpha_of(VertexId v) const
    {
        static const Rational zero;
        return v.value < alpha.size() ? alpha[v.value] : zero;
    }

    Rational dual_value() const
    {
        Rational d;
        for (const auto& a : alpha) d += a;
        for (const auto& u : uncertain) d += u.value;
        return d;
    }
};

/// (c, surplus, per-component) triple an algorithm is audited against.
struct AuditProfile {
    Rational c;
    Rational surplus;
    bool per_component = false;
};

struct PrimalValue {
    Rational total;
    std::map<std::uint32_t, Rational> by_component;
};

inline PrimalValue primal_by_component(const FracState& state, std::span<const Rational> weights,
                                       const std::vector<std::uint32_t>& component)
{
    PrimalValue p;
    for (std::size_t i = 0; i < state.edge_count(); ++i) {
        EdgeId e{static_cast<std::uint32_t>(i)};
        Rational contrib = weights.empty() ? state.fraction(e) : state.fraction(e) * weights[i];
        p.total += contrib;
        p.by_component[component.at(state.endpoints(e).first.value)] += contrib;
    }
    return p;
}

struct DualityReport {
    bool pass = true;
    Rational primal;
    Rational dual;
    std::vector<std::uint32_t> failing_components;
};

/// Reverse weak duality P >= D + surplus with D = sum(alpha) + sum(uncertain),
/// either globally or separately for every non-exempt component.
inline DualityReport check_weak_duality(const PrimalValue& primal, const DualSnapshot& snap, const Rational& surplus,
                                        bool per_component)
{
    DualityReport r;
    r.primal = primal.total;
    r.dual = snap.dual_value();
    if (!per_component) {
        r.pass = r.primal >= r.dual + surplus;
        return r;
    }
    if (!snap.component) throw UsageError("per-component duality check needs a vertex partition");
    const auto& comp = *snap.component;
    std::map<std::uint32_t, Rational> dual;
    std::set<std::uint32_t> seen;
    for (std::size_t v = 0; v < snap.alpha.size(); ++v) {
        dual[comp.at(v)] += snap.alpha[v];
    }
    for (const auto& u : snap.uncertain) dual[comp.at(u.u.value)] += u.value;
    for (const auto& [c, p] : primal.by_component) seen.insert(c);
    for (const auto& [c, d] : dual) seen.insert(c);
    for (auto c : seen) {
        if (snap.exempt_components.contains(c)) continue;
        auto pit = primal.by_component.find(c);
        Rational p = pit == primal.by_component.end() ? Rational(0) : pit->second;
        Rational d = dual.contains(c) ? dual[c] : Rational(0);
        // Components with no edges carry no surplus obligation.
        if (pit == primal.by_component.end() && d.is_zero()) continue;
        if (p < d + surplus) {
            r.pass = false;
            r.failing_components.push_back(c);
        }
    }
    return r;
}

struct EdgeView {
    EdgeId id;
    VertexId u;
    VertexId v;
    Rational weight;
};

struct FeasibilityReport {
    bool pass = true;
    std::vector<EdgeId> violated;
};

/// alpha(u) + alpha(v) + uncertain(u,v) >= c * w(u,v) on every listed edge.
inline FeasibilityReport check_feasibility(const Rational& c, std::span<const EdgeView> edges, const DualSnapshot& snap)
{
    std::map<std::uint32_t, Rational> on_edge;
    for (const auto& u : snap.uncertain) on_edge[u.edge.index] += u.value;
    FeasibilityReport r;
    for (const auto& e : edges) {
        Rational lhs = snap.alpha_of(e.u) + snap.alpha_of(e.v);
        if (auto it = on_edge.find(e.id.index); it != on_edge.end()) lhs += it->second;
        if (lhs < c * e.weight) {
            r.pass = false;
            r.violated.push_back(e.id);
        }
    }
    return r;
}

inline std::vector<EdgeView> edge_views(const FracState& state, std::span<const Rational> weights)
{
    std::vector<EdgeView> out;
    out.reserve(state.edge_count());
    for (std::size_t i = 0; i < state.edge_count(); ++i) {
        EdgeId e{static_cast<std::uint32_t>(i)};
        auto [u, v] = state.endpoints(e);
        out.push_back({e, u, v, weights.empty() ? Rational(1) : weights[i]});
    }
    return out;
}

/// Anything that consumes arrival events and exposes its state and duals.
template <class A>
concept AuditableAlgorithm = requires(A& a, const A& ca, const ArrivalEvent& ev) {
    { a.arrive(ev) } -> std::same_as<EdgeId>;
    { ca.state() } -> std::convertible_to<const FracState&>;
    { ca.dual_snapshot() } -> std::same_as<DualSnapshot>;
    { ca.invariant_violations() } -> std::same_as<std::vector<std::string>>;
    { A::audit_profile() } -> std::same_as<AuditProfile>;
};

struct EventAudit {
    std::size_t event = 0; ///< 1-based
    bool weak_duality = true;
    bool feasibility = true;
    bool invariants = true;
    std::vector<EdgeId> violated_edges;
    std::vector<std::uint32_t> failing_components;
    std::vector<std::string> notes;

    bool pass() const { return weak_duality && feasibility && invariants; }
};

struct AuditReport {
    std::vector<EventAudit> events;

    bool pass() const
    {
        for (const auto& e : events)
            if (!e.pass()) return false;
        return true;
    }
    std::size_t failures() const
    {
        std::size_t n = 0;
        for (const auto& e : events) n += e.pass() ? 0 : 1;
        return n;
    }
};

/// Checks the algorithm's current snapshot against its profile.
template <AuditableAlgorithm A>
EventAudit audit_now(const A& algo, std::size_t event, const std::function<void(DualSnapshot&)>& corrupt = {})
{
    const AuditProfile profile = A::audit_profile();
    const FracState& state = algo.state();
    auto weights = algo.weights();
    std::span<const Rational> w(weights.data(), weights.size());
    DualSnapshot snap = algo.dual_snapshot();
    if (corrupt) corrupt(snap);

    EventAudit out;
    out.event = event;
    PrimalValue primal;
    if (profile.per_component && snap.component) primal = primal_by_component(state, w, *snap.component);
    else primal.total = state.primal_value(w);
    auto dual = check_weak_duality(primal, snap, profile.surplus, profile.per_component);
    out.weak_duality = dual.pass;
    out.failing_components = std::move(dual.failing_components);
    auto views = edge_views(state, w);
    auto feas = check_feasibility(profile.c, views, snap);
    out.feasibility = feas.pass;
    out.violated_edges = std::move(feas.violated);
    out.notes = algo.invariant_violations();
    out.invariants = out.notes.empty();
    return out;
}

/// Feeds the stream event by event and audits after each one. `corrupt`
/// may tamper with every snapshot before checking (negative controls).
template <AuditableAlgorithm A>
AuditReport audit_run(A& algo, const InstanceStream& stream, const std::function<void(DualSnapshot&)>& corrupt = {})
{
    AuditReport report;
    report.events.reserve(stream.events.size());
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        algo.arrive(stream.events[i]);
        report.events.push_back(audit_now(algo, i + 1, corrupt));
    }
    return report;
}

} // namespace fdmatch
