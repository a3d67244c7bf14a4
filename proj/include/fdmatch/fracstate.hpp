#pragma once

#include "fdmatch/instance.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace fdmatch {

/// One step of a hypothetical growing-edge replay (used for trivial merges).
struct ReplayOp {
    enum class Kind { Dispose, Grow };
    Kind kind;
    EdgeId edge;
    Rational amount; ///< delta for Dispose, gamma for Grow
    Rational before; ///< lambda (pre-disposal fraction) for Dispose, parent load mu for Grow
    VertexId parent; ///< Grow only
    VertexId child;  ///< Grow only
};

/// A trivial merge is processed as if the arriving edge came first and the
/// isolated edge second, both growing leaves. `ops` lists that hypothetical
/// order; the isolated edge is absent from the graph until its Grow op.
struct ReplayRecord {
    EdgeId arriving;
    EdgeId isolated;
    std::vector<ReplayOp> ops;
};

struct DisposeStep {
    EdgeId edge;
    Rational amount; ///< delta
    Rational from;   ///< lambda, the fraction before this disposal
};

struct MatchStep {
    EdgeId edge;
    VertexId u;
    VertexId v;
    Rational amount; ///< gamma
    EdgeKind kind;
    Rational load_u; ///< x(u) immediately before the match
    Rational load_v; ///< x(v) immediately before the match
    std::optional<ReplayRecord> replay;

    /// mu for a growing edge: the parent's load before the match.
    const Rational& parent_load() const
    {
        const auto& g = std::get<GrowingEdge>(kind);
        return g.parent == u ? load_u : load_v;
    }
};

/// Time 2t-1 holds the disposals preceding arrival t, time 2t its match.
struct TraceStep {
    std::int64_t time = 0;
    std::variant<DisposeStep, MatchStep> action;
    /// Disposal realized as part of a trivial-merge replay at the same arrival.
    bool replay_part = false;
};

using Trace = std::vector<TraceStep>;

/// Fractional matching under free disposal: fractions rise only at an edge's
/// own arrival, may fall at any time, and vertex loads never exceed 1.
class FracState {
public:
    /// Registers the next arriving edge with fraction 0 and opens its step.
    EdgeId arrive(VertexId u, VertexId v)
    {
        if (open_ && !matched_current_) throw StateError("previous arrival was never matched");
        if (u == v) throw StateError("self-loop");
        if (!pairs_.insert(std::minmax(u.value, v.value)).second) throw StateError("edge already arrived");
        ensure_vertex(u);
        ensure_vertex(v);
        EdgeId id{static_cast<std::uint32_t>(x_.size())};
        x_.emplace_back(0);
        ends_.emplace_back(u, v);
        open_ = true;
        matched_current_ = false;
        return id;
    }

    EdgeId arrive(const ArrivalEvent& ev) { return arrive(ev.u, ev.v); }

    void dispose(EdgeId e, const Rational& new_fraction, bool replay_part = false)
    {
        if (e.index >= x_.size()) throw StateError("unknown edge");
        if (!open_) throw StateError("no open arrival");
        if (matched_current_) throw StateError("disposals must precede the match of the current arrival");
        Rational& x = x_[e.index];
        if (new_fraction > x) throw IllegalIncrease("disposal would raise x(e) from " + x.str() + " to " + new_fraction.str());
        if (new_fraction.sign() < 0) throw StateError("negative fraction");
        if (new_fraction == x) return;
        Rational delta = x - new_fraction;
        trace_.push_back({disposal_time(), DisposeStep{e, delta, x}, replay_part});
        auto [a, b] = ends_[e.index];
        load_[a.value] -= delta;
        load_[b.value] -= delta;
        x = new_fraction;
    }

    void match(EdgeId e, const Rational& fraction, const EdgeKind& kind, std::optional<ReplayRecord> replay = std::nullopt)
    {
        if (!open_ || e.index + 1 != x_.size()) throw StateError("only the current arrival can be matched");
        if (matched_current_) throw StateError("current arrival already matched");
        if (fraction.sign() < 0) throw StateError("negative fraction");
        auto [u, v] = ends_[e.index];
        Rational lu = load_[u.value];
        Rational lv = load_[v.value];
        if (lu + fraction > Rational(1) || lv + fraction > Rational(1) || fraction > Rational(1))
            throw PolytopeViolation("matching " + fraction.str() + " exceeds a vertex capacity (loads " + lu.str() + ", " +
                                    lv.str() + ")");
        x_[e.index] = fraction;
        load_[u.value] += fraction;
        load_[v.value] += fraction;
        trace_.push_back({match_time(), MatchStep{e, u, v, fraction, kind, std::move(lu), std::move(lv), std::move(replay)}, false});
        matched_current_ = true;
    }

    const Rational& fraction(EdgeId e) const { return x_.at(e.index); }
    const Rational& load(VertexId v) const
    {
        static const Rational zero;
        return v.value < load_.size() ? load_[v.value] : zero;
    }
    std::pair<VertexId, VertexId> endpoints(EdgeId e) const { return ends_.at(e.index); }
    std::size_t edge_count() const { return x_.size(); }
    std::size_t vertex_count() const { return load_.size(); }
    const std::vector<Rational>& fractions() const { return x_; }
    const Trace& trace() const { return trace_; }

    /// Arrival index t of the open step (0 before any arrival).
    std::size_t current_arrival() const { return x_.size(); }
    std::int64_t disposal_time() const { return 2 * static_cast<std::int64_t>(x_.size()) - 1; }
    std::int64_t match_time() const { return 2 * static_cast<std::int64_t>(x_.size()); }

    /// Sum of x(e) * w(e); an empty weight list means every weight is 1.
    Rational primal_value(std::span<const Rational> weights = {}) const
    {
        Rational p;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (x_[i].is_zero()) continue;
            p += weights.empty() ? x_[i] : x_[i] * weights[i];
        }
        return p;
    }

    /// Rebuilds a state by applying a trace, checking that every recorded
    /// load and lambda matches the state at that point.
    static FracState replay(const Trace& trace)
    {
        FracState s;
        for (const auto& step : trace) {
            if (const auto* m = std::get_if<MatchStep>(&step.action)) {
                if (step.time != 2 * static_cast<std::int64_t>(m->edge.arrival()))
                    throw StateError("match logged at the wrong time");
                EdgeId id = s.arrive(m->u, m->v);
                if (id != m->edge) throw StateError("trace edge ids are not consecutive");
                if (s.load(m->u) != m->load_u || s.load(m->v) != m->load_v)
                    throw StateError("recorded pre-match loads disagree with replayed state");
                s.match(id, m->amount, m->kind, m->replay);
            } else {
                const auto& d = std::get<DisposeStep>(step.action);
                if (d.edge.index >= s.x_.size() || s.x_[d.edge.index] != d.from)
                    throw StateError("recorded lambda disagrees with replayed state");
                // Disposals at 2t-1 precede arrival t, which has not been opened yet.
                if (step.time != 2 * static_cast<std::int64_t>(s.x_.size() + 1) - 1)
                    throw StateError("disposal logged at the wrong time");
                s.pending_dispose(d.edge, d.from - d.amount, step.replay_part);
            }
        }
        return s;
    }

    friend bool operator==(const FracState& a, const FracState& b) { return a.x_ == b.x_ && a.ends_ == b.ends_; }

private:
    void ensure_vertex(VertexId v)
    {
        if (v.value >= load_.size()) load_.resize(v.value + 1);
    }

    // Replay helper: disposals in a trace belong to the next arrival.
    void pending_dispose(EdgeId e, const Rational& new_fraction, bool replay_part)
    {
        Rational& x = x_[e.index];
        Rational delta = x - new_fraction;
        trace_.push_back({2 * static_cast<std::int64_t>(x_.size() + 1) - 1, DisposeStep{e, delta, x}, replay_part});
        auto [a, b] = ends_[e.index];
        load_[a.value] -= delta;
        load_[b.value] -= delta;
        x = new_fraction;
    }

    std::vector<Rational> x_;
    std::vector<Rational> load_;
    std::vector<std::pair<VertexId, VertexId>> ends_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    Trace trace_;
    bool open_ = false;
    bool matched_current_ = false;
};

/// Debug export, one record per line:
///   <time> dispose <edge> delta=<d> from=<lambda>
///   <time> match <edge> <kind> gamma=<g> loads=<mu_u>,<mu_v>
inline std::string export_trace(const Trace& trace)
{
    std::ostringstream out;
    for (const auto& step : trace) {
        out << step.time << ' ';
        if (const auto* d = std::get_if<DisposeStep>(&step.action)) {
            out << "dispose " << d->edge.arrival() << " delta=" << d->amount << " from=" << d->from;
            if (step.replay_part) out << " replay";
        } else {
            const auto& m = std::get<MatchStep>(step.action);
            out << "match " << m.edge.arrival() << ' ' << kind_name(m.kind) << " gamma=" << m.amount << " loads=" << m.load_u
                << ',' << m.load_v;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace fdmatch
