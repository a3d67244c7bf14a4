#pragma once

#include "fdmatch/generators.hpp"
#include "fdmatch/instance_io.hpp"
#include "fdmatch/mcm_forest.hpp"
#include "fdmatch/mcm_tree.hpp"
#include "fdmatch/mwm_tree.hpp"
#include "fdmatch/oracle.hpp"
#include "fdmatch/pd_verify.hpp"
#include "fdmatch/rounding.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fdmatch {

/// Integral baseline without disposal: take an edge iff both endpoints are free.
class GreedyIntegral {
public:
    EdgeId arrive(const ArrivalEvent& ev)
    {
        graph_.ensure_vertex(ev.u);
        graph_.ensure_vertex(ev.v);
        EdgeKind kind = graph_.classify(ev.u, ev.v);
        EdgeId e = state_.arrive(ev.u, ev.v);
        bool free = state_.load(ev.u).is_zero() && state_.load(ev.v).is_zero();
        state_.match(e, Rational(free ? 1 : 0), kind);
        graph_.add(ev.u, ev.v);
        return e;
    }
    const FracState& state() const { return state_; }
    std::vector<Rational> weights() const { return {}; }

private:
    FracState state_;
    ForestGraph graph_;
};

inline const std::vector<std::string>& algorithm_ids()
{
    static const std::vector<std::string> ids{"mcm-tree", "mcm-forest", "mwm", "greedy"};
    return ids;
}

/// Competitive ratio each algorithm is proven to reach.
inline Rational guarantee(const std::string& algo)
{
    if (algo == "mcm-tree") return Rational(2, 3);
    if (algo == "mcm-forest") return Rational(5, 8);
    if (algo == "mwm" || algo == "greedy") return Rational(1, 2);
    throw UsageError("unknown algorithm '" + algo + "'");
}

struct RunOutcome {
    std::string algo;
    FracState state;
    std::vector<Rational> weights; ///< empty when the objective is cardinality
    std::optional<AuditReport> audit;

    Rational primal() const { return state.primal_value(weights); }
};

namespace detail {

template <class A>
RunOutcome drive(A algo, const std::string& id, const InstanceStream& stream, bool audit)
{
    RunOutcome out;
    out.algo = id;
    if constexpr (AuditableAlgorithm<A>) {
        if (audit) out.audit = audit_run(algo, stream);
        else
            for (const auto& ev : stream.events) algo.arrive(ev);
    } else {
        if (audit) throw UsageError("algorithm '" + id + "' has no dual certificate to audit");
        for (const auto& ev : stream.events) algo.arrive(ev);
    }
    auto w = algo.weights();
    out.weights.assign(w.begin(), w.end());
    out.state = algo.state();
    return out;
}

} // namespace detail

inline RunOutcome run_algorithm(const std::string& id, const InstanceStream& stream, bool audit = false)
{
    if (id == "mcm-tree") return detail::drive(TreeMatcher{}, id, stream, audit);
    if (id == "mcm-forest") return detail::drive(ForestMatcher{}, id, stream, audit);
    if (id == "mwm") return detail::drive(OrdinalMatcher{}, id, stream, audit);
    if (id == "greedy") return detail::drive(GreedyIntegral{}, id, stream, audit);
    throw UsageError("unknown algorithm '" + id + "'");
}

struct AuditEntry {
    std::size_t event = 0;
    std::string check;
    bool pass = true;
    std::string detail;
};

struct MonteCarloEntry {
    EdgeId edge;
    Rational x;
    double freq = 0;
    std::uint64_t trials = 0;
    double z = 0;
};

struct Report {
    std::string instance;
    std::string algo;
    Rational alg;
    Rational opt;
    Rational ratio;
    bool audited = false;
    std::size_t audit_events = 0;
    std::vector<AuditEntry> audits; ///< failed checks only; audit_events counts all audited events
    std::optional<std::vector<MonteCarloEntry>> monte_carlo;
    std::optional<std::uint64_t> seed;
    double ms = 0;
    std::vector<std::string> flags;
    std::string error;
    bool pass = true;
};

inline std::vector<AuditEntry> failed_checks(const AuditReport& audit)
{
    std::vector<AuditEntry> out;
    auto join = [](const auto& items, auto&& fmt) {
        std::string s;
        for (const auto& it : items) s += (s.empty() ? "" : ",") + fmt(it);
        return s;
    };
    for (const auto& e : audit.events) {
        if (!e.weak_duality)
            out.push_back({e.event, "weak-duality", false,
                           join(e.failing_components, [](std::uint32_t c) { return "component " + std::to_string(c); })});
        if (!e.feasibility)
            out.push_back({e.event, "feasibility", false,
                           join(e.violated_edges, [](EdgeId x) { return "edge " + std::to_string(x.arrival()); })});
        if (!e.invariants)
            out.push_back({e.event, "invariants", false, join(e.notes, [](const std::string& s) { return s; })});
    }
    return out;
}

/// Runs, audits and compares to the offline optimum.
inline Report evaluate(const std::string& algo, const InstanceStream& stream, const std::string& label, bool audit)
{
    Report r;
    r.instance = label;
    r.algo = algo;
    try {
        auto outcome = run_algorithm(algo, stream, audit);
        r.alg = outcome.primal();
        r.opt = offline_optimum(stream);
        r.ratio = r.opt.is_zero() ? Rational(1) : r.alg / r.opt;
        if (outcome.audit) {
            r.audited = true;
            r.audit_events = outcome.audit->events.size();
            r.audits = failed_checks(*outcome.audit);
        }
        r.pass = r.audits.empty() && r.ratio >= guarantee(algo);
    } catch (const Error& ex) {
        r.error = ex.what();
        r.pass = false;
    }
    return r;
}

/// Adds a Monte Carlo table for the algorithm's trace to the report.
inline MonteCarloResult attach_monte_carlo(Report& r, const RunOutcome& outcome, std::uint64_t trials, std::uint64_t seed)
{
    auto plan = compile(outcome.state.trace());
    auto mc = monte_carlo(plan, trials, seed, outcome.weights);
    std::vector<MonteCarloEntry> table;
    for (std::size_t i = 0; i < plan.edge_count(); ++i) {
        EdgeId e{static_cast<std::uint32_t>(i)};
        const Rational& x = plan.final_x[i];
        table.push_back({e, x, mc.frequency(e), mc.trials, z_score(x, mc.edge_counts[i], mc.trials)});
        if (!within_binomial_band(x, mc.edge_counts[i], mc.trials)) r.flags.push_back("edge " + std::to_string(e.arrival()) + " outside 3-sigma band");
    }
    r.monte_carlo = std::move(table);
    r.seed = seed;
    return mc;
}

inline nlohmann::json to_json(const Report& r)
{
    nlohmann::json j;
    j["instance"] = r.instance;
    j["algo"] = r.algo;
    j["alg"] = r.alg.str();
    j["opt"] = r.opt.str();
    j["ratio"] = r.ratio.str();
    j["pass"] = r.pass;
    j["audited"] = r.audited;
    j["audit_events"] = r.audit_events;
    j["audits"] = nlohmann::json::array();
    for (const auto& a : r.audits)
        j["audits"].push_back({{"event", a.event}, {"check", a.check}, {"pass", a.pass}, {"detail", a.detail}});
    if (r.monte_carlo) {
        auto& mc = j["monte_carlo"] = nlohmann::json::array();
        for (const auto& m : *r.monte_carlo)
            mc.push_back({{"edge", m.edge.arrival()}, {"x", m.x.str()}, {"freq", m.freq}, {"trials", m.trials}, {"z", m.z}});
    }
    j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    j["ms"] = r.ms;
    if (!r.flags.empty()) j["flags"] = r.flags;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

// ---------------------------------------------------------------------------
// Adaptive adversary for cardinality matching on growing trees.

struct AdaptiveResult {
    Report report;
    InstanceStream stream;
    Rational upper_bound;     ///< 2/3 + 2/(3n)
    bool reasonable = true;   ///< no spine edge lost fraction after the next children arrived
    bool within_band = false; ///< 2/3 <= ratio <= upper_bound
};

/// Grows a spine: u_i receives two fresh children, and the child whose edge
/// carries the larger fraction (the later one on ties) becomes u_{i+1}. Only
/// public fractions of arrived edges are read.
template <class Algo>
AdaptiveResult run_adaptive_hard_mcm(Algo& algo, std::size_t n, const std::string& algo_id)
{
    if (n == 0) throw InvalidParameter("adversary needs n >= 1");
    AdaptiveResult res;
    InstanceStream& s = res.stream;
    s.model = ArrivalModel::GrowingTree;
    s.names.push_back("u1");
    VertexId spine{0};
    std::vector<std::pair<EdgeId, Rational>> spine_edges; // edge and its fraction once the next pair arrived
    for (std::size_t i = 1; i <= n; ++i) {
        VertexId a{static_cast<std::uint32_t>(s.names.size())};
        VertexId b{a.value + 1};
        s.names.emplace_back();
        s.names.emplace_back();
        s.events.push_back({spine, a, std::nullopt});
        EdgeId ea = algo.arrive(s.events.back());
        s.events.push_back({spine, b, std::nullopt});
        EdgeId eb = algo.arrive(s.events.back());
        if (!spine_edges.empty()) spine_edges.back().second = algo.state().fraction(spine_edges.back().first);
        Rational xa = algo.state().fraction(ea);
        Rational xb = algo.state().fraction(eb);
        bool pick_a = xa > xb;
        VertexId next = pick_a ? a : b;
        VertexId leg = pick_a ? b : a;
        s.names[next.value] = "u" + std::to_string(i + 1);
        s.names[leg.value] = "v" + std::to_string(i);
        spine_edges.emplace_back(pick_a ? ea : eb, Rational(0));
        spine = next;
    }
    for (std::size_t i = 0; i + 1 < spine_edges.size(); ++i)
        if (algo.state().fraction(spine_edges[i].first) != spine_edges[i].second) res.reasonable = false;

    Report& r = res.report;
    r.instance = "adaptive-hard-mcm n=" + std::to_string(n);
    r.algo = algo_id;
    r.alg = algo.state().primal_value();
    r.opt = offline_optimum(s);
    r.ratio = r.alg / r.opt;
    res.upper_bound = Rational(2, 3) + Rational(2) / Rational(3 * n);
    res.within_band = r.ratio >= Rational(2, 3) && r.ratio <= res.upper_bound;
    if (!res.reasonable) r.flags.push_back("spine edge disposed after its children arrived; upper bound not claimed");
    r.pass = r.ratio >= guarantee(algo_id) && (!res.reasonable || r.ratio <= res.upper_bound || algo_id == "greedy");
    return res;
}

inline AdaptiveResult run_adaptive_hard_mcm(const std::string& algo_id, std::size_t n)
{
    if (algo_id == "mcm-tree") {
        TreeMatcher a;
        return run_adaptive_hard_mcm(a, n, algo_id);
    }
    if (algo_id == "mcm-forest") {
        ForestMatcher a;
        return run_adaptive_hard_mcm(a, n, algo_id);
    }
    if (algo_id == "greedy") {
        GreedyIntegral a;
        return run_adaptive_hard_mcm(a, n, algo_id);
    }
    throw UsageError("adaptive adversary supports mcm-tree, mcm-forest and greedy");
}

// ---------------------------------------------------------------------------
// Ordinal hardness pair for weighted matching.

/// Smallest integer C >= 2 such that every spine weight C^i of I2(n, C)
/// exceeds the sum of all weights that arrived before it.
inline Rational auto_base(std::size_t n)
{
    for (long c = 2;; ++c) {
        Rational base(c);
        Rational before;
        bool ok = true;
        for (std::size_t i = 1; i <= n && ok; ++i) {
            before += pow(base, static_cast<unsigned>(i - 1)); // leg i
            Rational spine = pow(base, static_cast<unsigned>(i));
            if (spine <= before) ok = false;
            before += spine;
        }
        if (ok) return base;
    }
}

/// (1/2 - delta) + (3/2 + delta + (n-1)eps) / (n + (n^2 - n + 2) eps / 2).
inline Rational hardness_bound(std::size_t n, const Rational& eps, const Rational& delta)
{
    Rational nn(n);
    Rational num = Rational(3, 2) + delta + (nn - Rational(1)) * eps;
    Rational den = nn + (nn * nn - nn + Rational(2)) * eps / Rational(2);
    return Rational(1, 2) - delta + num / den;
}

struct HardMwmResult {
    Report arithmetic; ///< I1(n, eps)
    Report geometric;  ///< I2(n, C)
    Rational base;
    bool identical_signatures = false;
    Rational bound; ///< hardness_bound at the probe delta
};

inline HardMwmResult run_hard_mwm(std::size_t n, const Rational& eps, std::optional<Rational> base, const Rational& delta)
{
    HardMwmResult res;
    res.base = base ? *base : auto_base(n);
    auto i1 = gen_hard_mwm(n, ArithmeticWeights{eps});
    auto i2 = gen_hard_mwm(n, GeometricWeights{res.base});
    res.identical_signatures = ordinal_signature(i1) == ordinal_signature(i2);
    res.arithmetic = evaluate("mwm", i1, "I1 n=" + std::to_string(n) + " eps=" + eps.str(), true);
    res.geometric = evaluate("mwm", i2, "I2 n=" + std::to_string(n) + " C=" + res.base.str(), true);
    res.bound = hardness_bound(n, eps, delta);
    return res;
}

// ---------------------------------------------------------------------------
// Suites.

struct SuiteItem {
    std::string algo;
    std::optional<std::string> file;
    std::string gen; ///< tree | forest | weighted-tree | hard-mcm | hard-mwm
    std::size_t n = 0;
    std::size_t max_edges = 0;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    Rational merge_bias{1, 4};
    Rational eps{1, 1000};
    bool audit = true;
    std::uint64_t trials = 0;
};

inline Rational json_rational(const nlohmann::json& j)
{
    if (j.is_number_integer()) return Rational(j.get<long long>());
    auto q = Rational::parse(j.get<std::string>());
    if (!q) throw UsageError("bad rational '" + j.get<std::string>() + "'");
    return *q;
}

inline std::vector<SuiteItem> parse_suite(const nlohmann::json& config)
{
    const nlohmann::json& items = config.is_object() && config.contains("items") ? config["items"] : config;
    if (!items.is_array()) throw UsageError("suite config must be a JSON list of items");
    std::vector<SuiteItem> out;
    for (const auto& j : items) {
        SuiteItem it;
        it.algo = j.at("algo").get<std::string>();
        guarantee(it.algo);
        if (j.contains("instance")) it.file = j["instance"].get<std::string>();
        it.gen = j.value("gen", std::string());
        if (!it.file && it.gen.empty()) throw UsageError("suite item needs 'instance' or 'gen'");
        it.n = j.value("n", std::size_t{0});
        it.max_edges = j.value("max_edges", std::size_t{0});
        it.seed = j.value("seed", std::uint64_t{0});
        it.count = j.value("count", std::size_t{1});
        if (j.contains("merge_bias")) it.merge_bias = json_rational(j["merge_bias"]);
        if (j.contains("eps")) it.eps = json_rational(j["eps"]);
        it.audit = j.value("audit", it.algo != "greedy");
        it.trials = j.value("trials", std::uint64_t{0});
        out.push_back(std::move(it));
    }
    return out;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Instance number k of a suite item, with its label.
inline std::pair<InstanceStream, std::string> suite_instance(const SuiteItem& it, std::size_t k)
{
    if (it.file) return {parse_stream(read_file(*it.file)), *it.file};
    std::uint64_t seed = it.seed + k;
    std::size_t n = it.n;
    if (n == 0) {
        if (it.max_edges == 0) throw UsageError("generated suite item needs 'n' or 'max_edges'");
        n = 1 + mix_seed(seed, 99) % it.max_edges;
    }
    std::string label = it.gen + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
    if (it.gen == "tree") return {gen_random_growing_tree(n, seed), label};
    if (it.gen == "forest") return {gen_random_forest(n, it.merge_bias, seed), label + " bias=" + it.merge_bias.str()};
    if (it.gen == "weighted-tree") return {with_random_weights(gen_random_growing_tree(n, seed), seed), label};
    if (it.gen == "hard-mcm") return {gen_hard_mcm_static(n), "hard-mcm n=" + std::to_string(n)};
    if (it.gen == "hard-mwm") return {gen_hard_mwm(n, ArithmeticWeights{it.eps}), "hard-mwm n=" + std::to_string(n)};
    throw UsageError("unknown generator '" + it.gen + "'");
}

struct SuiteOptions {
    unsigned threads = 0;
    bool timing = false; ///< record wall-clock ms; off keeps reports byte-identical
};

/// Runs every (item, instance) pair; errors are recorded per report and the
/// suite continues. Output order follows the config regardless of threading.
inline std::vector<Report> run_suite(const std::vector<SuiteItem>& items, const SuiteOptions& opt = {})
{
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t k = 0; k < std::max<std::size_t>(items[i].count, 1); ++k) jobs.emplace_back(i, k);
    std::vector<Report> reports(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
            const auto& it = items[jobs[j].first];
            auto start = std::chrono::steady_clock::now();
            Report r;
            try {
                auto [stream, label] = suite_instance(it, jobs[j].second);
                r = evaluate(it.algo, stream, label, it.audit);
                if (it.trials > 0 && r.error.empty()) {
                    auto outcome = run_algorithm(it.algo, stream, false);
                    attach_monte_carlo(r, outcome, it.trials, it.seed + jobs[j].second);
                }
            } catch (const std::exception& ex) {
                r.algo = it.algo;
                r.error = ex.what();
                r.pass = false;
            }
            if (opt.timing)
                r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            reports[j] = std::move(r);
        }
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return reports;
}

} // namespace fdmatch
