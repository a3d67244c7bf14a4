#pragma once

#include "fdmatch/fracstate.hpp"
#include "fdmatch/pd_verify.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdmatch {

struct OrdinalDecision {
    enum class Kind { MatchHalf, MatchZero, Dispose };
    Kind kind;
    EdgeId edge;
    friend bool operator==(const OrdinalDecision&, const OrdinalDecision&) = default;
};

inline std::string to_string(const OrdinalDecision& d)
{
    switch (d.kind) {
    case OrdinalDecision::Kind::MatchHalf: return "half(" + std::to_string(d.edge.arrival()) + ")";
    case OrdinalDecision::Kind::MatchZero: return "zero(" + std::to_string(d.edge.arrival()) + ")";
    case OrdinalDecision::Kind::Dispose: return "dispose(" + std::to_string(d.edge.arrival()) + ")";
    }
    return "?";
}

/// Two integral matchings whose average is the half-integral fractional
/// matching: every half edge lies in exactly one of them, and the first half
/// edge of each component always goes to M1.
class TwoMatchings {
public:
    void add(EdgeId e, VertexId parent, VertexId child)
    {
        grow(std::max(parent.value, child.value) + 1);
        std::optional<int> side;
        bool fresh_component = !in_ef_[parent.value];
        if (fresh_component) {
            side = 1;
        } else {
            bool m0 = mate_[0][parent.value].has_value();
            bool m1 = mate_[1][parent.value].has_value();
            if (m0 && m1) throw InvariantBroken("vertex matched in both matchings before a half match");
            side = m1 ? 0 : 1;
        }
        set_[*side].insert(e);
        mate_[*side][parent.value] = e;
        mate_[*side][child.value] = e;
        ends_[e.index] = {parent, child};
        in_ef_[parent.value] = true;
        in_ef_[child.value] = true;
        // Children are fresh leaves, so a join never fuses two existing components
        // and the parent's representative survives unless its component is new.
        std::uint32_t root = sets_.join_with_edge(parent.value, child.value);
        if (fresh_component) first_[root] = e;
    }

    void remove(EdgeId e)
    {
        auto [a, b] = ends_.at(e.index);
        for (int s = 0; s < 2; ++s) {
            if (set_[s].erase(e)) {
                mate_[s][a.value].reset();
                mate_[s][b.value].reset();
            }
        }
    }

    const std::set<EdgeId>& matching(int bit) const { return set_[bit & 1]; }
    std::optional<EdgeId> component_first(VertexId v) const
    {
        if (v.value >= in_ef_.size() || !in_ef_[v.value]) return std::nullopt;
        auto it = first_.find(sets_.find(v.value));
        return it == first_.end() ? std::nullopt : std::optional<EdgeId>(it->second);
    }
    std::vector<EdgeId> component_firsts() const
    {
        std::vector<EdgeId> out;
        for (const auto& [rep, e] : first_) out.push_back(e);
        return out;
    }

    void reserve_edges(std::size_t n) { ends_.resize(n); }

private:
    void grow(std::size_t n)
    {
        if (in_ef_.size() < n) {
            in_ef_.resize(n);
            mate_[0].resize(n);
            mate_[1].resize(n);
            sets_.grow(n);
        }
    }

    std::set<EdgeId> set_[2];
    std::vector<std::optional<EdgeId>> mate_[2];
    std::vector<bool> in_ef_;
    std::vector<std::pair<VertexId, VertexId>> ends_;
    DisjointSets sets_;
    std::map<std::uint32_t, EdgeId> first_;
};

/// Half-integral weighted matching on growing trees that only compares
/// weights: a full parent swaps its lighter half edge for a strictly heavier
/// arrival.
class OrdinalMatcher {
public:
    static AuditProfile audit_profile() { return {Rational(1, 2), Rational(0), false}; }

    EdgeId arrive(const ArrivalEvent& ev)
    {
        graph_.ensure_vertex(ev.u);
        graph_.ensure_vertex(ev.v);
        EdgeKind kind = graph_.classify(ev.u, ev.v);
        if (is_merge(kind)) throw ModelViolation("ordinal algorithm received a merge edge");
        VertexId u = ev.u;
        VertexId v = ev.v;
        if (std::holds_alternative<IsolatedEdge>(kind)) {
            if (graph_.edge_count() > 0) throw ModelViolation("ordinal algorithm received a disconnected edge");
            root_ = ev.u;
        } else {
            u = std::get<GrowingEdge>(kind).parent;
            v = std::get<GrowingEdge>(kind).child;
        }
        Rational w = ev.weight ? *ev.weight : Rational(1);

        EdgeId e = state_.arrive(ev.u, ev.v);
        weights_.push_back(w);
        two_.reserve_edges(weights_.size());
        const Rational half(1, 2);
        if (state_.load(u) <= half) {
            state_.match(e, half, kind);
            signature_.push_back({OrdinalDecision::Kind::MatchHalf, e});
            two_.add(e, u, v);
        } else {
            std::optional<EdgeId> e1;
            for (EdgeId f : graph_.incident(u)) {
                if (state_.fraction(f) != half) continue;
                // Incident lists are in arrival order, so ties keep the earlier edge.
                if (!e1 || weights_[f.index] < weights_[e1->index]) e1 = f;
            }
            if (!e1) throw InvariantBroken("full vertex without half edges");
            if (w > weights_[e1->index]) {
                state_.dispose(*e1, Rational(0));
                signature_.push_back({OrdinalDecision::Kind::Dispose, *e1});
                two_.remove(*e1);
                state_.match(e, half, kind);
                signature_.push_back({OrdinalDecision::Kind::MatchHalf, e});
                two_.add(e, u, v);
            } else {
                state_.match(e, Rational(0), kind);
                signature_.push_back({OrdinalDecision::Kind::MatchZero, e});
            }
        }
        graph_.add(ev.u, ev.v);
        if (heavy_.size() < graph_.vertex_count()) heavy_.resize(graph_.vertex_count());
        auto& h = heavy_[u.value];
        if (!h || w > weights_[h->index]) h = e;
        return e;
    }

    const FracState& state() const { return state_; }
    const ForestGraph& graph() const { return graph_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const std::vector<OrdinalDecision>& signature() const { return signature_; }
    const TwoMatchings& two_matchings() const { return two_; }

    /// Heavy child edge h_u of a non-leaf u (earliest arrival among the heaviest).
    std::optional<EdgeId> heavy_edge(VertexId u) const
    {
        return u.value < heavy_.size() ? heavy_[u.value] : std::nullopt;
    }

    /// (sum of weights of half edges, sum over non-leaves of w(u, h_u)).
    std::pair<Rational, Rational> heavy_certificate() const
    {
        Rational lhs, rhs;
        for (std::size_t i = 0; i < weights_.size(); ++i)
            if (!state_.fractions()[i].is_zero()) lhs += weights_[i];
        for (const auto& h : heavy_)
            if (h) rhs += weights_[h->index];
        return {lhs, rhs};
    }

    /// alpha(u) = w(u, h_u) / 2 on non-leaves.
    DualSnapshot dual_snapshot() const
    {
        DualSnapshot snap;
        snap.alpha.resize(graph_.vertex_count());
        for (std::size_t i = 0; i < heavy_.size(); ++i)
            if (heavy_[i]) snap.alpha[i] = weights_[heavy_[i]->index] / Rational(2);
        return snap;
    }

    std::vector<std::string> invariant_violations() const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < state_.edge_count(); ++i) {
            const Rational& x = state_.fractions()[i];
            if (!x.is_zero() && x != Rational(1, 2)) out.push_back("fraction outside {0, 1/2} on edge " + std::to_string(i + 1));
        }
        for (std::uint32_t v = 0; v < state_.vertex_count(); ++v)
            if (state_.load(VertexId{v}) > Rational(1)) out.push_back("load above 1 at vertex " + std::to_string(v));
        auto [lhs, rhs] = heavy_certificate();
        if (lhs < rhs) out.push_back("heavy-edge certificate fails: " + lhs.str() + " < " + rhs.str());
        for (int bit = 0; bit < 2; ++bit) {
            std::set<std::uint32_t> used;
            for (EdgeId e : two_.matching(bit)) {
                auto [a, b] = state_.endpoints(e);
                if (!used.insert(a.value).second || !used.insert(b.value).second)
                    out.push_back("M" + std::to_string(bit) + " is not a matching");
                if (state_.fraction(e).is_zero()) out.push_back("M" + std::to_string(bit) + " holds a disposed edge");
            }
        }
        for (std::size_t i = 0; i < state_.edge_count(); ++i) {
            EdgeId e{static_cast<std::uint32_t>(i)};
            int count = static_cast<int>(two_.matching(0).contains(e)) + static_cast<int>(two_.matching(1).contains(e));
            if (count != (state_.fraction(e).is_zero() ? 0 : 1))
                out.push_back("edge " + std::to_string(i + 1) + " is in the wrong number of matchings");
        }
        for (EdgeId f : two_.component_firsts()) {
            if (two_.matching(0).contains(f)) out.push_back("component's first edge sits in M0");
            if (!state_.fraction(f).is_zero() && !two_.matching(1).contains(f))
                out.push_back("component's first edge missing from M1");
        }
        return out;
    }

private:
    FracState state_;
    ForestGraph graph_;
    std::optional<VertexId> root_;
    std::vector<Rational> weights_;
    std::vector<std::optional<EdgeId>> heavy_;
    std::vector<OrdinalDecision> signature_;
    TwoMatchings two_;
};

inline OrdinalMatcher run_mwm(const InstanceStream& s)
{
    OrdinalMatcher m;
    for (const auto& ev : s.events) m.arrive(ev);
    return m;
}

inline std::vector<OrdinalDecision> ordinal_signature(const InstanceStream& s) { return run_mwm(s).signature(); }

/// M_bit after the whole stream.
inline std::vector<EdgeId> one_bit_run(const InstanceStream& s, int bit)
{
    auto m = run_mwm(s);
    const auto& set = m.two_matchings().matching(bit);
    return {set.begin(), set.end()};
}

} // namespace fdmatch
