#pragma once

#include "fdmatch/fracstate.hpp"
#include "fdmatch/pd_verify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fdmatch {

enum class TreeEdgeStatus { Unmatched, Stable, Unstable };

inline TreeEdgeStatus tree_edge_status(const Rational& x)
{
    if (x.is_zero()) return TreeEdgeStatus::Unmatched;
    if (x == Rational(1, 3)) return TreeEdgeStatus::Stable;
    if (x == Rational(2, 3) || x == Rational(1)) return TreeEdgeStatus::Unstable;
    throw InvariantBroken("tree edge fraction " + x.str() + " outside {0, 1/3, 2/3, 1}");
}

/// Fractional matching on growing trees: before matching a new leaf edge
/// (u, v), cut u's unstable edge (if any) back to 1/3, then fill u.
class TreeMatcher {
public:
    static AuditProfile audit_profile() { return {Rational(2, 3), Rational(0), false}; }

    EdgeId arrive(const ArrivalEvent& ev)
    {
        graph_.ensure_vertex(ev.u);
        graph_.ensure_vertex(ev.v);
        EdgeKind kind = graph_.classify(ev.u, ev.v);
        if (is_merge(kind)) throw ModelViolation("tree algorithm received a merge edge");
        VertexId u = ev.u;
        VertexId v = ev.v;
        if (std::holds_alternative<IsolatedEdge>(kind)) {
            if (graph_.edge_count() > 0) throw ModelViolation("tree algorithm received a disconnected edge");
            root_ = ev.u;
        } else {
            const auto& g = std::get<GrowingEdge>(kind);
            u = g.parent;
            v = g.child;
        }

        EdgeId e = state_.arrive(ev.u, ev.v);
        std::optional<EdgeId> heavy;
        for (EdgeId f : graph_.incident(u)) {
            if (state_.fraction(f) >= Rational(2, 3)) {
                if (heavy) throw InvariantBroken("vertex has two incident edges at >= 2/3");
                heavy = f;
            }
        }
        if (heavy) {
            if (tree_edge_status(state_.fraction(*heavy)) != TreeEdgeStatus::Unstable)
                history_.push_back("disposed a non-unstable edge");
            state_.dispose(*heavy, Rational(1, 3));
        }
        state_.match(e, Rational(1) - state_.load(u), kind);
        graph_.add(ev.u, ev.v);
        if (parent_.size() < graph_.vertex_count()) {
            parent_.resize(graph_.vertex_count());
            parent_edge_.resize(graph_.vertex_count());
        }
        parent_[v.value] = u;
        parent_edge_[v.value] = e;
        return e;
    }

    const FracState& state() const { return state_; }
    const ForestGraph& graph() const { return graph_; }
    std::vector<Rational> weights() const { return {}; }
    std::optional<VertexId> root() const { return root_; }
    std::optional<VertexId> parent(VertexId v) const
    {
        return v.value < parent_.size() ? parent_[v.value] : std::nullopt;
    }

    bool is_leaf(VertexId v) const { return !(root_ && *root_ == v) && graph_.degree(v) <= 1; }

    /// alpha(v) = x(v) - x(p_v, v) for non-leaves, 0 for leaves, x(root) at the root.
    DualSnapshot dual_snapshot() const
    {
        DualSnapshot snap;
        snap.alpha.resize(graph_.vertex_count());
        for (std::uint32_t i = 0; i < graph_.vertex_count(); ++i) {
            VertexId v{i};
            if (graph_.degree(v) == 0 || is_leaf(v)) continue;
            snap.alpha[i] = state_.load(v);
            if (parent_edge_[i]) snap.alpha[i] -= state_.fraction(*parent_edge_[i]);
        }
        return snap;
    }

    std::vector<std::string> invariant_violations() const
    {
        std::vector<std::string> out = history_;
        for (std::size_t i = 0; i < state_.edge_count(); ++i) {
            try {
                tree_edge_status(state_.fractions()[i]);
            } catch (const InvariantBroken& ex) {
                out.emplace_back(ex.what());
            }
        }
        auto snap = dual_snapshot();
        for (std::uint32_t i = 0; i < graph_.vertex_count(); ++i) {
            VertexId v{i};
            if (graph_.degree(v) == 0 || is_leaf(v)) continue;
            const Rational& a = snap.alpha[i];
            if (a.sign() < 0) out.push_back("negative dual at vertex " + std::to_string(i));
            if (a < Rational(1, 3)) out.push_back("non-leaf dual below 1/3 at vertex " + std::to_string(i));
            bool near_leaf = false;
            for (EdgeId f : graph_.incident(v)) near_leaf = near_leaf || is_leaf(graph_.other(f, v));
            if (near_leaf && a < Rational(2, 3))
                out.push_back("dual below 2/3 next to a leaf at vertex " + std::to_string(i));
        }
        if (snap.dual_value() != state_.primal_value()) out.push_back("primal differs from dual sum");
        return out;
    }

private:
    FracState state_;
    ForestGraph graph_;
    std::optional<VertexId> root_;
    std::vector<std::optional<VertexId>> parent_;
    std::vector<std::optional<EdgeId>> parent_edge_;
    std::vector<std::string> history_;
};

} // namespace fdmatch
