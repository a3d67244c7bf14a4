#pragma once

#include "fdmatch/fracstate.hpp"
#include "fdmatch/random.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace fdmatch {

/// Smallest unit of the randomized algorithm.
struct MicroOp {
    enum class Kind {
        Drop,    ///< if matched, unmatch with `probability`
        Add,     ///< if unmatched and both endpoints free, match with `probability`
        Defer,   ///< if matched, unmatch and remember it for the next Commit
        Commit,  ///< match the deferred edge, if any
    };
    Kind kind;
    EdgeId edge;
    Rational probability;
    ExactCoin coin;
};

struct PlanStep {
    enum class Kind { Dispose, Match, Replay, ReplayCommit };
    Kind kind = Kind::Dispose;
    std::int64_t time = 0;
    EdgeId edge;
    /// Drop probability delta/lambda (Dispose) or conditional match probability (Match).
    Rational probability;
    std::optional<EdgeKind> tag;
    Rational gamma;
    Rational mu_u;
    Rational mu_v;
    std::vector<MicroOp> ops;
    /// Fractions that hold once this step is done.
    std::vector<std::pair<EdgeId, Rational>> updates;
};

struct RoundingPlan {
    std::vector<PlanStep> steps;
    std::vector<std::pair<VertexId, VertexId>> ends;
    std::size_t vertex_count = 0;
    std::vector<Rational> final_x;

    std::size_t edge_count() const { return ends.size(); }
};

namespace detail {

inline MicroOp micro(MicroOp::Kind kind, EdgeId e, Rational p = Rational(1))
{
    ExactCoin coin(p);
    return {kind, e, std::move(p), coin};
}

inline PlanStep plan_step(PlanStep::Kind kind, std::int64_t time, EdgeId edge)
{
    PlanStep s;
    s.kind = kind;
    s.time = time;
    s.edge = edge;
    return s;
}

inline Rational conditional_match(const Rational& gamma, const Rational& mu_u, const Rational& mu_v, const std::string& where)
{
    Rational free_mass = (Rational(1) - mu_u) * (Rational(1) - mu_v);
    if (free_mass.is_zero()) {
        if (!gamma.is_zero()) throw LemmaConditionError(where + ": positive match on a saturated vertex");
        return Rational(0);
    }
    Rational p = gamma / free_mass;
    if (p > Rational(1))
        throw LemmaConditionError(where + ": gamma " + gamma.str() + " exceeds (1-mu1)(1-mu2) = " + free_mass.str());
    return p;
}

} // namespace detail

/// Turns a fractional trace into the randomized integral algorithm and
/// validates every probability before any sampling.
inline RoundingPlan compile(const Trace& trace)
{
    RoundingPlan plan;
    std::vector<Rational> x;
    bool has_merge = false;
    for (const auto& step : trace)
        if (const auto* m = std::get_if<MatchStep>(&step.action); m && is_merge(m->kind)) has_merge = true;

    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& step = trace[i];
        std::string where = "step " + std::to_string(i + 1) + " (time " + std::to_string(step.time) + ")";
        if (const auto* d = std::get_if<DisposeStep>(&step.action)) {
            if (d->edge.index >= x.size() || x[d->edge.index] != d->from)
                throw LemmaConditionError(where + ": recorded lambda disagrees with the trace");
            x[d->edge.index] = d->from - d->amount;
            if (step.replay_part) continue; // realized inside the replay step
            if (d->from.sign() <= 0 || d->amount > d->from) throw LemmaConditionError(where + ": bad disposal");
            PlanStep ps = detail::plan_step(PlanStep::Kind::Dispose, step.time, d->edge);
            ps.probability = d->amount / d->from;
            ps.ops.push_back(detail::micro(MicroOp::Kind::Drop, d->edge, ps.probability));
            ps.updates.emplace_back(d->edge, x[d->edge.index]);
            plan.steps.push_back(std::move(ps));
            continue;
        }
        const auto& m = std::get<MatchStep>(step.action);
        if (m.edge.index != plan.ends.size()) throw LemmaConditionError(where + ": edges out of order");
        plan.ends.emplace_back(m.u, m.v);
        plan.vertex_count = std::max<std::size_t>(plan.vertex_count, std::max(m.u.value, m.v.value) + 1);
        x.emplace_back(0);

        if (m.replay) {
            const auto& rec = *m.replay;
            EdgeId iso = rec.isolated;
            PlanStep rs = detail::plan_step(PlanStep::Kind::Replay, step.time - 1, m.edge);
            // Replayed fractions: the isolated edge restarts from 0 in the hypothetical order.
            std::map<std::uint32_t, Rational> hyp;
            auto hx = [&](EdgeId e) -> Rational {
                if (auto it = hyp.find(e.index); it != hyp.end()) return it->second;
                if (e == iso || e == m.edge) return Rational(0);
                return x[e.index];
            };
            // x already holds the realized post-replay fractions; recover lambda(e') from the trace.
            Rational lambda_iso = x[iso.index];
            for (std::size_t k = i; k-- > 0 && trace[k].time == step.time - 1;) {
                if (const auto* d = std::get_if<DisposeStep>(&trace[k].action); d && d->edge == iso) lambda_iso = d->from;
            }
            if (lambda_iso != Rational(1)) throw LemmaConditionError(where + ": isolated edge not fully matched at its merge");
            rs.ops.push_back(detail::micro(MicroOp::Kind::Drop, iso, Rational(1)));
            for (std::size_t k = 0; k < rec.ops.size(); ++k) {
                const auto& op = rec.ops[k];
                std::string at = where + " replay op " + std::to_string(k + 1);
                if (op.kind == ReplayOp::Kind::Dispose) {
                    Rational lambda = op.edge == iso || op.edge == m.edge ? hx(op.edge) : op.before;
                    if (lambda != op.before || lambda.sign() <= 0) throw LemmaConditionError(at + ": inconsistent lambda");
                    hyp[op.edge.index] = op.before - op.amount;
                    rs.ops.push_back(detail::micro(MicroOp::Kind::Drop, op.edge, op.amount / op.before));
                } else {
                    Rational p = detail::conditional_match(op.amount, op.before, Rational(0), at);
                    hyp[op.edge.index] = op.amount;
                    rs.ops.push_back(detail::micro(MicroOp::Kind::Add, op.edge, p));
                }
            }
            rs.ops.push_back(detail::micro(MicroOp::Kind::Defer, m.edge));
            for (const auto& [idx, val] : hyp)
                if (idx != m.edge.index) rs.updates.emplace_back(EdgeId{idx}, x[idx]);
            if (hx(m.edge) != m.amount) throw LemmaConditionError(where + ": replay disagrees with the recorded match");
            plan.steps.push_back(std::move(rs));

            PlanStep cs = detail::plan_step(PlanStep::Kind::ReplayCommit, step.time, m.edge);
            cs.tag = m.kind;
            cs.gamma = m.amount;
            cs.mu_u = m.load_u;
            cs.mu_v = m.load_v;
            cs.probability = Rational(1);
            cs.ops.push_back(detail::micro(MicroOp::Kind::Commit, m.edge));
            x[m.edge.index] = m.amount;
            cs.updates.emplace_back(m.edge, m.amount);
            plan.steps.push_back(std::move(cs));
            continue;
        }

        if (has_merge && std::holds_alternative<IsolatedEdge>(m.kind) && m.amount != Rational(1))
            throw LemmaConditionError(where + ": isolated edge matched below 1");
        PlanStep ps = detail::plan_step(PlanStep::Kind::Match, step.time, m.edge);
        ps.tag = m.kind;
        ps.gamma = m.amount;
        ps.mu_u = m.load_u;
        ps.mu_v = m.load_v;
        ps.probability = detail::conditional_match(m.amount, m.load_u, m.load_v, where);
        x[m.edge.index] = m.amount;
        if (!m.amount.is_zero()) ps.ops.push_back(detail::micro(MicroOp::Kind::Add, m.edge, ps.probability));
        ps.updates.emplace_back(m.edge, m.amount);
        plan.steps.push_back(std::move(ps));
    }
    plan.final_x = std::move(x);
    return plan;
}

/// Mutable state of one randomized execution.
struct RealizedRun {
    std::vector<char> matched;
    std::vector<std::int64_t> mate; ///< matched edge index per vertex, -1 if free
    std::optional<EdgeId> deferred;
    std::uint64_t seed = 0;

    std::vector<EdgeId> matching() const
    {
        std::vector<EdgeId> out;
        for (std::size_t i = 0; i < matched.size(); ++i)
            if (matched[i]) out.push_back(EdgeId{static_cast<std::uint32_t>(i)});
        return out;
    }
    bool vertex_matched(VertexId v) const { return mate[v.value] >= 0; }
};

namespace detail {

inline void unmatch(RealizedRun& run, const RoundingPlan& plan, EdgeId e)
{
    run.matched[e.index] = 0;
    auto [u, v] = plan.ends[e.index];
    run.mate[u.value] = -1;
    run.mate[v.value] = -1;
}

inline void apply_op(RealizedRun& run, const RoundingPlan& plan, const MicroOp& op, Engine& rng)
{
    switch (op.kind) {
    case MicroOp::Kind::Drop:
        if (run.matched[op.edge.index] && op.coin.flip(rng)) unmatch(run, plan, op.edge);
        break;
    case MicroOp::Kind::Add: {
        auto [u, v] = plan.ends[op.edge.index];
        if (run.matched[op.edge.index] || run.mate[u.value] >= 0 || run.mate[v.value] >= 0) break;
        if (!op.coin.flip(rng)) break;
        run.matched[op.edge.index] = 1;
        run.mate[u.value] = run.mate[v.value] = op.edge.index;
        break;
    }
    case MicroOp::Kind::Defer:
        if (run.matched[op.edge.index]) {
            unmatch(run, plan, op.edge);
            run.deferred = op.edge;
        }
        break;
    case MicroOp::Kind::Commit:
        if (run.deferred && *run.deferred == op.edge) {
            auto [u, v] = plan.ends[op.edge.index];
            if (run.mate[u.value] >= 0 || run.mate[v.value] >= 0) throw InvariantBroken("deferred edge lost its endpoints");
            run.matched[op.edge.index] = 1;
            run.mate[u.value] = run.mate[v.value] = op.edge.index;
        }
        run.deferred.reset();
        break;
    }
}

} // namespace detail

inline RealizedRun sample(const RoundingPlan& plan, std::uint64_t seed)
{
    RealizedRun run;
    run.seed = seed;
    run.matched.assign(plan.edge_count(), 0);
    run.mate.assign(plan.vertex_count, -1);
    Engine rng(seed);
    for (const auto& step : plan.steps)
        for (const auto& op : step.ops) detail::apply_op(run, plan, op, rng);
    return run;
}

struct MergeCounter {
    std::size_t step = 0; ///< index into plan.steps
    EdgeId edge;
    std::uint64_t u_matched = 0;
    std::uint64_t v_matched = 0;
    std::uint64_t both_matched = 0;
};

/// Counters from independent trials; merging two results adds them.
struct MonteCarloResult {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> edge_counts;
    std::uint64_t size_sum = 0;
    std::uint64_t size_sq_sum = 0;
    Rational weight_sum;
    double weight_sq_sum = 0;
    std::vector<MergeCounter> merges;

    void merge(const MonteCarloResult& o)
    {
        if (edge_counts.empty()) {
            *this = o;
            return;
        }
        trials += o.trials;
        for (std::size_t i = 0; i < edge_counts.size(); ++i) edge_counts[i] += o.edge_counts[i];
        size_sum += o.size_sum;
        size_sq_sum += o.size_sq_sum;
        weight_sum += o.weight_sum;
        weight_sq_sum += o.weight_sq_sum;
        for (std::size_t i = 0; i < merges.size(); ++i) {
            merges[i].u_matched += o.merges[i].u_matched;
            merges[i].v_matched += o.merges[i].v_matched;
            merges[i].both_matched += o.merges[i].both_matched;
        }
    }

    double frequency(EdgeId e) const { return static_cast<double>(edge_counts.at(e.index)) / static_cast<double>(trials); }
    double mean_size() const { return static_cast<double>(size_sum) / static_cast<double>(trials); }
    double size_stddev() const
    {
        double m = mean_size();
        double var = static_cast<double>(size_sq_sum) / static_cast<double>(trials) - m * m;
        return var > 0 ? std::sqrt(var) : 0.0;
    }
    double mean_weight() const { return weight_sum.to_double() / static_cast<double>(trials); }
    double weight_stddev() const
    {
        double m = mean_weight();
        double var = weight_sq_sum / static_cast<double>(trials) - m * m;
        return var > 0 ? std::sqrt(var) : 0.0;
    }
};

/// Standard score of an observed frequency against probability x.
inline double z_score(const Rational& x, std::uint64_t count, std::uint64_t trials)
{
    double p = x.to_double();
    double f = static_cast<double>(count) / static_cast<double>(trials);
    double sd = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    if (sd == 0) return f == p ? 0.0 : HUGE_VAL;
    return (f - p) / sd;
}

/// True when |freq - x| <= k * sqrt(x(1-x)/trials).
inline bool within_binomial_band(const Rational& x, std::uint64_t count, std::uint64_t trials, double k = 3.0)
{
    double p = x.to_double();
    double f = static_cast<double>(count) / static_cast<double>(trials);
    return std::abs(f - p) <= k * std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

namespace detail {

inline MonteCarloResult run_trials(const RoundingPlan& plan, std::uint64_t begin, std::uint64_t end, std::uint64_t master_seed,
                                   std::span<const Rational> weights)
{
    MonteCarloResult r;
    r.edge_counts.assign(plan.edge_count(), 0);
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        const auto& st = plan.steps[s];
        if (st.kind == PlanStep::Kind::Match && st.tag && std::holds_alternative<NonTrivialMerge>(*st.tag))
            r.merges.push_back({s, st.edge});
    }
    for (std::uint64_t t = begin; t < end; ++t) {
        RealizedRun run;
        run.seed = mix_seed(master_seed, t);
        run.matched.assign(plan.edge_count(), 0);
        run.mate.assign(plan.vertex_count, -1);
        Engine rng(run.seed);
        std::size_t next_merge = 0;
        for (std::size_t s = 0; s < plan.steps.size(); ++s) {
            if (next_merge < r.merges.size() && r.merges[next_merge].step == s) {
                auto [u, v] = plan.ends[plan.steps[s].edge.index];
                bool mu = run.vertex_matched(u);
                bool mv = run.vertex_matched(v);
                r.merges[next_merge].u_matched += mu;
                r.merges[next_merge].v_matched += mv;
                r.merges[next_merge].both_matched += mu && mv;
                ++next_merge;
            }
            for (const auto& op : plan.steps[s].ops) apply_op(run, plan, op, rng);
        }
        std::uint64_t size = 0;
        Rational weight;
        for (std::size_t i = 0; i < run.matched.size(); ++i) {
            if (!run.matched[i]) continue;
            ++r.edge_counts[i];
            ++size;
            if (!weights.empty()) weight += weights[i];
        }
        ++r.trials;
        r.size_sum += size;
        r.size_sq_sum += size * size;
        if (!weights.empty()) {
            double wd = weight.to_double();
            r.weight_sum += weight;
            r.weight_sq_sum += wd * wd;
        }
    }
    return r;
}

} // namespace detail

/// Runs `trials` independent samples; trial i uses seed mix_seed(master_seed, i),
/// so the result does not depend on how trials are split across threads.
inline MonteCarloResult monte_carlo(const RoundingPlan& plan, std::uint64_t trials, std::uint64_t master_seed,
                                    std::span<const Rational> weights = {}, unsigned threads = 0)
{
    if (trials == 0) throw InvalidParameter("trials must be at least 1");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
    std::vector<MonteCarloResult> parts(threads);
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) {
        std::uint64_t b = trials * k / threads;
        std::uint64_t e = trials * (k + 1) / threads;
        if (threads == 1) parts[k] = detail::run_trials(plan, b, e, master_seed, weights);
        else pool.emplace_back([&, k, b, e] { parts[k] = detail::run_trials(plan, b, e, master_seed, weights); });
    }
    for (auto& t : pool) t.join();
    MonteCarloResult total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

struct TimePoint {
    std::int64_t time = 0;
    std::vector<Rational> probability; ///< Pr[edge matched] after this time
    std::vector<Rational> fraction;    ///< x(edge) after this time
};

struct MergeIndependence {
    EdgeId edge;
    Rational p_u;
    Rational p_v;
    Rational p_uv;
    bool independent() const { return p_uv == p_u * p_v; }
};

struct ExactReport {
    std::vector<TimePoint> timeline;
    std::vector<MergeIndependence> merges;
    bool lossless = true;
    std::optional<std::int64_t> first_mismatch_time;
};

/// Enumerates the full probability tree of the plan with exact rationals.
inline ExactReport exact_distribution(const RoundingPlan& plan, std::size_t max_steps = 20)
{
    if (plan.steps.size() > max_steps)
        throw SizeLimit("plan has " + std::to_string(plan.steps.size()) + " steps, limit " + std::to_string(max_steps));
    if (plan.edge_count() > 64) throw SizeLimit("exact enumeration supports at most 64 edges");

    using Key = std::pair<std::uint64_t, int>; // matched mask, deferred edge + 1 (0 = none)
    std::map<Key, Rational> dist{{{0, 0}, Rational(1)}};
    auto vertex_busy = [&](std::uint64_t mask, VertexId w) {
        for (std::size_t i = 0; i < plan.edge_count(); ++i)
            if ((mask >> i & 1u) && (plan.ends[i].first == w || plan.ends[i].second == w)) return true;
        return false;
    };

    ExactReport report;
    std::vector<Rational> x(plan.edge_count());
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        const auto& step = plan.steps[s];
        if (step.kind == PlanStep::Kind::Match && step.tag && std::holds_alternative<NonTrivialMerge>(*step.tag)) {
            auto [u, v] = plan.ends[step.edge.index];
            MergeIndependence mi;
            mi.edge = step.edge;
            for (const auto& [key, p] : dist) {
                bool bu = vertex_busy(key.first, u);
                bool bv = vertex_busy(key.first, v);
                if (bu) mi.p_u += p;
                if (bv) mi.p_v += p;
                if (bu && bv) mi.p_uv += p;
            }
            report.merges.push_back(mi);
        }
        for (const auto& op : step.ops) {
            std::map<Key, Rational> next;
            std::uint64_t bit = std::uint64_t{1} << op.edge.index;
            for (const auto& [key, p] : dist) {
                auto [mask, deferred] = key;
                switch (op.kind) {
                case MicroOp::Kind::Drop:
                    if (mask & bit) {
                        if (!op.probability.is_zero()) next[{mask & ~bit, deferred}] += p * op.probability;
                        if (op.probability != Rational(1)) next[{mask, deferred}] += p * (Rational(1) - op.probability);
                    } else {
                        next[key] += p;
                    }
                    break;
                case MicroOp::Kind::Add: {
                    auto [a, b] = plan.ends[op.edge.index];
                    if ((mask & bit) || vertex_busy(mask, a) || vertex_busy(mask, b)) {
                        next[key] += p;
                        break;
                    }
                    if (!op.probability.is_zero()) next[{mask | bit, deferred}] += p * op.probability;
                    if (op.probability != Rational(1)) next[{mask, deferred}] += p * (Rational(1) - op.probability);
                    break;
                }
                case MicroOp::Kind::Defer:
                    if (mask & bit) next[{mask & ~bit, static_cast<int>(op.edge.index) + 1}] += p;
                    else next[key] += p;
                    break;
                case MicroOp::Kind::Commit:
                    if (deferred == static_cast<int>(op.edge.index) + 1) next[{mask | bit, 0}] += p;
                    else next[{mask, 0}] += p;
                    break;
                }
            }
            dist = std::move(next);
        }
        for (const auto& [e, val] : step.updates) x[e.index] = val;

        bool group_ends = s + 1 == plan.steps.size() || plan.steps[s + 1].time != step.time;
        if (!group_ends) continue;
        TimePoint tp{step.time, std::vector<Rational>(plan.edge_count()), x};
        for (const auto& [key, p] : dist)
            for (std::size_t i = 0; i < plan.edge_count(); ++i)
                if (key.first >> i & 1u) tp.probability[i] += p;
        if (tp.probability != tp.fraction && report.lossless) {
            report.lossless = false;
            report.first_mismatch_time = step.time;
        }
        report.timeline.push_back(std::move(tp));
    }
    return report;
}

/// The (gamma, mu1, mu2) triple of every positively matched non-trivial merge.
inline std::vector<std::array<Rational, 3>> merge_triples(const RoundingPlan& plan)
{
    std::vector<std::array<Rational, 3>> out;
    for (const auto& st : plan.steps) {
        if (st.kind != PlanStep::Kind::Match || !st.tag || !std::holds_alternative<NonTrivialMerge>(*st.tag)) continue;
        if (st.gamma.is_zero()) continue;
        out.push_back({st.gamma, st.mu_u, st.mu_v});
    }
    return out;
}

/// True when the triple is dominated by (3/8, 3/8, 3/8) or (1/8, 3/8, 5/8) in either order.
inline bool dominated_by_known_triple(const std::array<Rational, 3>& t)
{
    const Rational a(3, 8), b(5, 8);
    if (t[0] == Rational(3, 8)) return t[1] <= a && t[2] <= a;
    if (t[0] == Rational(1, 8)) return (t[1] <= a && t[2] <= b) || (t[1] <= b && t[2] <= a);
    return false;
}

} // namespace fdmatch
