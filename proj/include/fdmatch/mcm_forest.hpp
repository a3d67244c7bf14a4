#pragma once

#include "fdmatch/fracstate.hpp"
#include "fdmatch/pd_verify.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace fdmatch {

enum class VertexRole { Fresh, Leaf, TypeA, TypeB };

inline const char* role_name(VertexRole r)
{
    switch (r) {
    case VertexRole::Fresh: return "fresh";
    case VertexRole::Leaf: return "leaf";
    case VertexRole::TypeA: return "A";
    case VertexRole::TypeB: return "B";
    }
    return "?";
}

/// Fractional matching on forests with eighths: type A vertices collect
/// parent-only duals from growing edges, type B vertices sit on positively
/// matched merge edges, and each tree keeps a 2/8 surplus for later merges.
class ForestMatcher {
public:
    enum class EdgeClass { Isolated, Growing, Merge };

    struct VertexRecord {
        VertexRole role = VertexRole::Fresh;
        bool root = false;
        Rational alpha;
        std::optional<VertexId> parent;
        std::optional<EdgeId> parent_edge;
        std::optional<EdgeId> uncertain_edge;
    };

    struct EdgeRecord {
        EdgeClass cls = EdgeClass::Isolated;
        VertexId u;
        VertexId v;
        VertexId parent; ///< growing edges only
        Rational uncertain;
    };

    static AuditProfile audit_profile() { return {Rational(5, 8), Rational(2, 8), true}; }

    EdgeId arrive(const ArrivalEvent& ev)
    {
        graph_.ensure_vertex(ev.u);
        graph_.ensure_vertex(ev.v);
        ensure_vertex(ev.u);
        ensure_vertex(ev.v);
        EdgeKind kind = graph_.classify(ev.u, ev.v);

        EdgeId e = state_.arrive(ev.u, ev.v);
        x_.emplace_back(0);
        edges_.push_back({EdgeClass::Isolated, ev.u, ev.v, ev.u, Rational(0)});

        if (std::holds_alternative<IsolatedEdge>(kind)) {
            commit_match(e, Rational(1), kind);
            vert(ev.u).role = VertexRole::Leaf;
            vert(ev.v).role = VertexRole::Leaf;
            // Provisional dual so the lone edge is covered at 5/8.
            vert(ev.u).alpha = Rational(6, 8);
            link(e);
        } else if (const auto* g = std::get_if<GrowingEdge>(&kind)) {
            grow(e, g->parent, g->child, kind);
            link(e);
        } else if (const auto* t = std::get_if<TrivialMerge>(&kind)) {
            trivial_merge(e, t->isolated_edge, ev);
        } else {
            merge(e, ev.u, ev.v);
            link(e);
        }
        graph_.add(ev.u, ev.v);
        comps_.join_with_edge(ev.u.value, ev.v.value);
        return e;
    }

    const FracState& state() const { return state_; }
    const ForestGraph& graph() const { return graph_; }
    std::vector<Rational> weights() const { return {}; }
    const VertexRecord& vertex(VertexId v) const { return verts_.at(v.value); }
    const EdgeRecord& edge(EdgeId e) const { return edges_.at(e.index); }

    bool unsafe(VertexId v) const
    {
        const auto& r = verts_.at(v.value);
        return r.role == VertexRole::TypeB && r.alpha + Rational(1) - load_[v.value] < Rational(5, 8);
    }

    DualSnapshot dual_snapshot() const
    {
        DualSnapshot snap;
        snap.alpha.reserve(verts_.size());
        for (const auto& r : verts_) snap.alpha.push_back(r.alpha);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (edges_[i].uncertain.is_zero()) continue;
            snap.uncertain.push_back({EdgeId{static_cast<std::uint32_t>(i)}, edges_[i].u, edges_[i].v, edges_[i].uncertain});
        }
        std::vector<std::uint32_t> comp(verts_.size());
        for (std::uint32_t v = 0; v < verts_.size(); ++v) comp[v] = comps_.find(v);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (edges_[i].cls == EdgeClass::Isolated) snap.exempt_components.insert(comp[edges_[i].u.value]);
        }
        snap.component = std::move(comp);
        return snap;
    }

    std::vector<std::string> invariant_violations() const
    {
        std::vector<std::string> out = history_;
        auto vname = [](std::uint32_t v) { return "vertex " + std::to_string(v); };
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const Rational& x = x_[i];
            if (x.sign() < 0 || x > Rational(1) || (x * Rational(8)).denominator() != 1)
                out.push_back("edge " + std::to_string(i + 1) + " fraction " + x.str() + " is not an eighth in [0,1]");
            if (!edges_[i].uncertain.is_zero() && edges_[i].uncertain != Rational(1, 8))
                out.push_back("uncertain dual other than 1/8 on edge " + std::to_string(i + 1));
        }
        for (std::uint32_t v = 0; v < verts_.size(); ++v) {
            const auto& r = verts_[v];
            VertexId id{v};
            if (load_[v] > Rational(1)) out.push_back("load above 1 at " + vname(v));
            if (r.alpha.sign() < 0) out.push_back("negative dual at " + vname(v));
            if (r.role == VertexRole::TypeA) {
                bool near_leaf = false;
                Rational child_sum;
                for (EdgeId f : adj_[v]) {
                    const auto& er = edges_[f.index];
                    VertexId w = er.u == id ? er.v : er.u;
                    near_leaf = near_leaf || adj_[w.value].size() == 1;
                    if (er.cls == EdgeClass::Merge && !x_[f.index].is_zero())
                        out.push_back("type A " + vname(v) + " on a positively matched merge edge");
                    if (er.cls == EdgeClass::Growing && er.parent == id) child_sum += x_[f.index];
                }
                if (r.alpha < Rational(3, 8)) out.push_back("type A dual below 3/8 at " + vname(v));
                if (near_leaf && r.alpha < Rational(5, 8)) out.push_back("type A dual below 5/8 next to a leaf at " + vname(v));
                Rational expect = r.root ? child_sum - Rational(2, 8) : child_sum;
                if (r.alpha != expect) out.push_back("type A dual departs from its parent-only closed form at " + vname(v));
            } else if (r.role == VertexRole::TypeB) {
                if (r.alpha < Rational(2, 8)) out.push_back("type B dual below 2/8 at " + vname(v));
                std::size_t marked = 0;
                for (EdgeId f : adj_[v]) {
                    const auto& er = edges_[f.index];
                    if (er.cls == EdgeClass::Growing && x_[f.index] > Rational(3, 8))
                        out.push_back("unstable growing edge at type B " + vname(v));
                    if (!er.uncertain.is_zero()) ++marked;
                }
                if (unsafe(id)) {
                    if (r.alpha + Rational(1) - load_[v] != Rational(4, 8))
                        out.push_back("unsafe " + vname(v) + " below 4/8 slack");
                    if (marked != 1 || !r.uncertain_edge)
                        out.push_back("unsafe " + vname(v) + " without exactly one uncertain edge");
                    else {
                        const auto& er = edges_[r.uncertain_edge->index];
                        VertexId z = er.u == id ? er.v : er.u;
                        if (verts_[z.value].role != VertexRole::TypeB)
                            out.push_back("uncertain partner of " + vname(v) + " is not type B");
                    }
                }
            }
        }
        return out;
    }

private:
    VertexRecord& vert(VertexId v) { return verts_[v.value]; }

    void ensure_vertex(VertexId v)
    {
        if (v.value >= verts_.size()) {
            verts_.resize(v.value + 1);
            load_.resize(v.value + 1);
            adj_.resize(v.value + 1);
            comps_.grow(v.value + 1);
        }
    }

    void link(EdgeId e)
    {
        adj_[edges_[e.index].u.value].push_back(e);
        adj_[edges_[e.index].v.value].push_back(e);
    }

    void unlink(EdgeId e)
    {
        for (VertexId w : {edges_[e.index].u, edges_[e.index].v}) {
            auto& list = adj_[w.value];
            list.erase(std::remove(list.begin(), list.end(), e), list.end());
        }
    }

    VertexId other(EdgeId e, VertexId v) const
    {
        const auto& er = edges_[e.index];
        return er.u == v ? er.v : er.u;
    }

    void set_role(VertexId v, VertexRole role)
    {
        auto& r = vert(v);
        if (r.role == role) return;
        if (r.role == VertexRole::TypeA || r.role == VertexRole::TypeB)
            history_.push_back("vertex " + std::to_string(v.value) + " changed from type " + role_name(r.role) + " to " +
                               role_name(role));
        r.role = role;
    }

    void set_alpha(VertexId v, const Rational& a)
    {
        auto& r = vert(v);
        if (r.role == VertexRole::TypeB && a < r.alpha)
            history_.push_back("type B dual decreased at vertex " + std::to_string(v.value));
        r.alpha = a;
    }

    /// Lowers x(e); goes to the real state, or to the replay log inside a trivial merge.
    void dispose_to(EdgeId e, const Rational& target)
    {
        Rational before = x_[e.index];
        if (target == before) return;
        const auto& er = edges_[e.index];
        if (er.cls == EdgeClass::Growing && !(replaying_ && e == hidden_)) {
            if (before <= Rational(3, 8) || target != Rational(3, 8))
                history_.push_back("growing edge " + std::to_string(e.arrival()) + " disposed from " + before.str() + " to " +
                                   target.str());
        }
        Rational delta = before - target;
        x_[e.index] = target;
        load_[er.u.value] -= delta;
        load_[er.v.value] -= delta;
        if (replaying_) ops_.push_back({ReplayOp::Kind::Dispose, e, delta, before, VertexId{}, VertexId{}});
        else state_.dispose(e, target);
    }

    void commit_match(EdgeId e, const Rational& g, const EdgeKind& kind)
    {
        const auto& er = edges_[e.index];
        state_.match(e, g, kind);
        x_[e.index] = g;
        load_[er.u.value] += g;
        load_[er.v.value] += g;
    }

    /// Matches a growing edge, either for real or as a hypothetical replay op.
    void match_growing(EdgeId e, VertexId parent, VertexId child, const Rational& g, const EdgeKind& kind)
    {
        if (!replaying_) {
            commit_match(e, g, kind);
            return;
        }
        if (load_[parent.value] + g > Rational(1) || load_[child.value] + g > Rational(1))
            throw PolytopeViolation("replayed growth exceeds a vertex capacity");
        ops_.push_back({ReplayOp::Kind::Grow, e, g, load_[parent.value], parent, child});
        x_[e.index] = g;
        load_[parent.value] += g;
        load_[child.value] += g;
    }

    /// Drops the uncertain 1/8 on v's marked edge together with 1/8 of its fraction.
    void settle_uncertain(VertexId v)
    {
        auto marker = vert(v).uncertain_edge;
        if (!marker) throw InvariantBroken("unsafe vertex " + std::to_string(v.value) + " has no uncertain edge");
        EdgeId m = *marker;
        dispose_to(m, x_[m.index] - Rational(1, 8));
        edges_[m.index].uncertain = Rational(0);
        vert(edges_[m.index].u).uncertain_edge.reset();
        vert(edges_[m.index].v).uncertain_edge.reset();
    }

    /// Cuts a leaf's unstable growing edge back to 3/8, charging its parent.
    void stabilize_leaf_edge(VertexId leaf)
    {
        EdgeId f = adj_[leaf.value].front();
        const auto& er = edges_[f.index];
        if (er.cls != EdgeClass::Growing) throw InvariantBroken("leaf edge is not a growing edge");
        if (x_[f.index] <= Rational(3, 8)) return;
        Rational delta = x_[f.index] - Rational(3, 8);
        if (verts_[er.parent.value].role == VertexRole::TypeB)
            throw InvariantBroken("unstable growing edge below a type B vertex");
        dispose_to(f, Rational(3, 8));
        set_alpha(er.parent, verts_[er.parent.value].alpha - delta);
    }

    void attach_child(EdgeId e, VertexId parent, VertexId child)
    {
        auto& er = edges_[e.index];
        er.cls = EdgeClass::Growing;
        er.parent = parent;
        auto& c = vert(child);
        c.role = VertexRole::Leaf;
        c.parent = parent;
        c.parent_edge = e;
    }

    void grow(EdgeId e, VertexId p, VertexId c, const EdgeKind& kind)
    {
        auto& pr = vert(p);
        if (adj_[p.value].size() == 1 && edges_[adj_[p.value].front().index].cls == EdgeClass::Isolated) {
            // Second edge of a two-vertex tree: the shared vertex becomes the root.
            EdgeId iso = adj_[p.value].front();
            VertexId q = other(iso, p);
            dispose_to(iso, Rational(4, 8));
            match_growing(e, p, c, Rational(4, 8), kind);
            attach_child(iso, p, q);
            attach_child(e, p, c);
            vert(q).alpha = Rational(0);
            pr.alpha = Rational(6, 8);
            pr.role = VertexRole::TypeA;
            pr.root = true;
            return;
        }
        if (pr.role == VertexRole::TypeB) {
            if (unsafe(p)) settle_uncertain(p);
            Rational g = max(Rational(5, 8) - pr.alpha, Rational(0));
            match_growing(e, p, c, g, kind);
            set_alpha(p, pr.alpha + g);
            attach_child(e, p, c);
            return;
        }
        if (pr.role != VertexRole::TypeA && pr.role != VertexRole::Leaf)
            throw WrongDispatch("growing edge parent has no role");
        std::vector<EdgeId> incident = adj_[p.value];
        for (EdgeId f : incident) {
            const auto& fr = edges_[f.index];
            if (fr.cls != EdgeClass::Growing || x_[f.index] < Rational(4, 8)) continue;
            if (verts_[other(f, p).value].role == VertexRole::TypeB)
                throw InvariantBroken("unstable growing edge reaches a type B vertex");
            Rational delta = x_[f.index] - Rational(3, 8);
            VertexId owner = fr.parent;
            dispose_to(f, Rational(3, 8));
            set_alpha(owner, verts_[owner.value].alpha - delta);
        }
        Rational g = Rational(1) - load_[p.value];
        match_growing(e, p, c, g, kind);
        set_role(p, VertexRole::TypeA);
        set_alpha(p, vert(p).alpha + g);
        attach_child(e, p, c);
    }

    void merge(EdgeId e, VertexId u, VertexId v)
    {
        edges_[e.index].cls = EdgeClass::Merge;
        bool leaf_u = adj_[u.value].size() == 1;
        bool leaf_v = adj_[v.value].size() == 1;
        if (vert(u).alpha + vert(v).alpha >= Rational(3, 8)) {
            for (VertexId w : {u, v}) {
                if (adj_[w.value].size() == 1) {
                    stabilize_leaf_edge(w);
                    set_role(w, VertexRole::TypeB);
                    set_alpha(w, Rational(2, 8));
                } else if (vert(w).role == VertexRole::TypeB && vert(w).alpha == Rational(2, 8)) {
                    set_alpha(w, Rational(3, 8));
                }
            }
            commit_match(e, Rational(0), NonTrivialMerge{});
            return;
        }
        if (leaf_u) stabilize_leaf_edge(u);
        if (leaf_v) stabilize_leaf_edge(v);
        if (leaf_u && leaf_v) {
            commit_match(e, Rational(3, 8), NonTrivialMerge{});
            for (VertexId w : {u, v}) {
                set_role(w, VertexRole::TypeB);
                set_alpha(w, Rational(2, 8));
                vert(w).uncertain_edge = e;
            }
            edges_[e.index].uncertain = Rational(1, 8);
            return;
        }
        VertexId leaf = leaf_u ? u : v;
        VertexId b = leaf_u ? v : u;
        if (!(leaf_u || leaf_v) || vert(b).role != VertexRole::TypeB || vert(b).alpha != Rational(2, 8))
            throw InvariantBroken("merge below 3/8 without a leaf and a 2/8 type B endpoint");
        if (unsafe(b)) settle_uncertain(b);
        commit_match(e, Rational(1, 8), NonTrivialMerge{});
        set_role(leaf, VertexRole::TypeB);
        set_alpha(leaf, Rational(2, 8));
        set_alpha(b, Rational(3, 8));
    }

    /// Merge (v1, v2) with a lone edge (u1, v1): processed as if (v1, v2) grew
    /// first and (u1, v1) second, then realized by disposals and one match.
    void trivial_merge(EdgeId e, EdgeId iso, const ArrivalEvent& ev)
    {
        const auto& ir = edges_[iso.index];
        VertexId v1 = (ir.u == ev.u || ir.v == ev.u) ? ev.u : ev.v;
        VertexId v2 = v1 == ev.u ? ev.v : ev.u;
        VertexId u1 = other(iso, v1);
        if (x_[iso.index] != Rational(1) || adj_[u1.value].size() != 1 || adj_[v1.value].size() != 1)
            throw WrongDispatch("trivial merge partner is not a lone fully matched edge");

        unlink(iso);
        Rational prior = x_[iso.index];
        x_[iso.index] = Rational(0);
        load_[u1.value] -= prior;
        load_[v1.value] -= prior;
        verts_[u1.value] = VertexRecord{};
        verts_[v1.value] = VertexRecord{};

        replaying_ = true;
        hidden_ = iso;
        ops_.clear();
        try {
            grow(e, v2, v1, GrowingEdge{v2, v1});
            link(e);
            grow(iso, v1, u1, GrowingEdge{v1, u1});
            link(iso);
        } catch (...) {
            replaying_ = false;
            throw;
        }
        replaying_ = false;

        // The replayed values live in x_; bring the real state in line.
        for (const auto& op : ops_) {
            if (op.kind != ReplayOp::Kind::Dispose || op.edge == e || op.edge == iso) continue;
            state_.dispose(op.edge, op.before - op.amount, true);
        }
        if (x_[iso.index] < prior) state_.dispose(iso, x_[iso.index], true);
        ReplayRecord record{e, iso, ops_};
        state_.match(e, x_[e.index], TrivialMerge{iso}, std::move(record));
    }

    FracState state_;
    ForestGraph graph_;
    DisjointSets comps_;
    std::vector<VertexRecord> verts_;
    std::vector<EdgeRecord> edges_;
    std::vector<Rational> x_;
    std::vector<Rational> load_;
    std::vector<std::vector<EdgeId>> adj_;
    std::vector<std::string> history_;
    bool replaying_ = false;
    EdgeId hidden_;
    std::vector<ReplayOp> ops_;
};

} // namespace fdmatch
