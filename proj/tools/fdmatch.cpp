#include "fdmatch/fdmatch.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace fdmatch;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

Rational parse_rational_option(const std::string& text, const char* what)
{
    auto q = Rational::parse(text);
    if (!q) throw UsageError(std::string("bad rational for ") + what + ": '" + text + "'");
    return *q;
}

void write_json(const nlohmann::json& j, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

void print_summary(const Report& r)
{
    std::cout << r.algo << " on " << r.instance << ": ALG=" << r.alg << " OPT=" << r.opt << " ratio=" << r.ratio << " ("
              << r.ratio.to_double() << ")";
    if (r.audited) std::cout << " audits=" << (r.audits.empty() ? "pass" : std::to_string(r.audits.size()) + " failed");
    if (!r.error.empty()) std::cout << " error=" << r.error;
    std::cout << (r.pass ? " PASS" : " FAIL") << '\n';
    for (const auto& f : r.flags) std::cout << "  flag: " << f << '\n';
    for (std::size_t i = 0; i < r.audits.size() && i < 10; ++i)
        std::cout << "  event " << r.audits[i].event << ' ' << r.audits[i].check << ": " << r.audits[i].detail << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online fractional matching under free disposal: algorithms, audits and rounding"};
    app.require_subcommand(1);
    int status = exit_ok;

    std::string file;
    auto* validate = app.add_subcommand("validate", "Check an instance file against its declared arrival model");
    validate->add_option("file", file, "instance file")->required();

    std::string algo, instance, report_path;
    bool audit = false;
    auto* run = app.add_subcommand("run", "Run an algorithm on an instance");
    run->add_option("--algo", algo, "mcm-tree | mcm-forest | mwm | greedy")->required();
    run->add_option("--instance", instance, "instance file")->required();
    run->add_flag("--audit", audit, "check duality, feasibility and invariants after every event");
    run->add_option("--report", report_path, "write a JSON report");

    auto* hard = app.add_subcommand("hard", "Adversarial instances");
    hard->require_subcommand(1);
    std::size_t n = 10;
    std::string eps_text = "1/1000", delta_text = "1/4", base_text;
    auto* hard_mcm = hard->add_subcommand("mcm", "Adaptive spine adversary for cardinality matching");
    hard_mcm->add_option("--n", n, "number of spine steps")->required();
    hard_mcm->add_option("--algo", algo, "mcm-tree | mcm-forest | greedy")->required();
    hard_mcm->add_option("--report", report_path, "write a JSON report");
    auto* hard_mwm = hard->add_subcommand("mwm", "Ordinal indistinguishability pair for weighted matching");
    hard_mwm->add_option("--n", n, "instance length")->required();
    hard_mwm->add_option("--eps", eps_text, "arithmetic step p/q");
    hard_mwm->add_option("--delta", delta_text, "probe delta for the bound curve");
    hard_mwm->add_option("--base", base_text, "geometric base C (default: smallest dominating integer)");
    hard_mwm->add_option("--algo", algo, "must be mwm (the only ordinal algorithm)");
    hard_mwm->add_option("--report", report_path, "write a JSON report");

    std::uint64_t trials = 10000, seed = 1;
    bool exact = false;
    auto* round = app.add_subcommand("round", "Round a fractional run into a randomized integral one");
    round->add_option("--algo", algo, "mcm-tree | mcm-forest | mwm")->required();
    round->add_option("--instance", instance, "instance file")->required();
    round->add_option("--trials", trials, "Monte Carlo trials");
    round->add_option("--seed", seed, "master seed");
    round->add_flag("--exact", exact, "enumerate the exact distribution (small traces only)");
    round->add_option("--report", report_path, "write a JSON report");

    std::string config;
    bool timing = false;
    unsigned threads = 0;
    auto* suite = app.add_subcommand("suite", "Run a JSON list of suite items");
    suite->add_option("--config", config, "suite config file")->required();
    suite->add_option("--report", report_path, "write the JSON report list (default stdout)");
    suite->add_flag("--timing", timing, "record wall-clock times (reports are no longer byte-identical)");
    suite->add_option("--threads", threads, "worker threads (default: hardware concurrency)");

    auto* gen = app.add_subcommand("gen", "Emit instance files");
    gen->require_subcommand(1);
    std::string out_path, bias_text = "1/4";
    bool weighted = false;
    auto* gen_tree = gen->add_subcommand("tree", "Random growing tree");
    gen_tree->add_option("--n", n, "edges")->required();
    gen_tree->add_option("--seed", seed, "seed");
    gen_tree->add_flag("--weighted", weighted, "attach random rational weights");
    auto* gen_forest = gen->add_subcommand("forest", "Random forest stream");
    gen_forest->add_option("--n", n, "edges")->required();
    gen_forest->add_option("--seed", seed, "seed");
    gen_forest->add_option("--merge-bias", bias_text, "probability of a merge step");
    auto* gen_hmcm = gen->add_subcommand("hard-mcm", "Static spine instance");
    gen_hmcm->add_option("--n", n, "spine steps")->required();
    auto* gen_hmwm = gen->add_subcommand("hard-mwm", "Weighted spine instance (arithmetic unless --base)");
    gen_hmwm->add_option("--n", n, "spine steps")->required();
    gen_hmwm->add_option("--eps", eps_text, "arithmetic step");
    gen_hmwm->add_option("--base", base_text, "geometric base");
    for (auto* g : {gen_tree, gen_forest, gen_hmcm, gen_hmwm}) g->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*validate) {
            auto stream = parse_stream(read_file(file));
            auto v = validate_model(stream);
            if (v.ok) std::cout << "ok: " << model_name(stream.model) << ", " << stream.edge_count() << " edges\n";
            else std::cout << "invalid: event " << v.event_index << ": " << v.reason << '\n';
            return v.ok ? exit_ok : exit_failure;
        }
        if (*run) {
            auto stream = parse_stream(read_file(instance));
            auto r = evaluate(algo, stream, instance, audit);
            print_summary(r);
            if (!report_path.empty()) write_json(to_json(r), report_path);
            return r.pass ? exit_ok : exit_failure;
        }
        if (*hard_mcm) {
            auto res = run_adaptive_hard_mcm(algo, n);
            print_summary(res.report);
            std::cout << "upper bound 2/3+2/(3n) = " << res.upper_bound << ", reasonable=" << (res.reasonable ? "yes" : "no")
                      << ", within band=" << (res.within_band ? "yes" : "no") << '\n';
            if (!report_path.empty()) {
                auto j = to_json(res.report);
                j["upper_bound"] = res.upper_bound.str();
                j["reasonable"] = res.reasonable;
                write_json(j, report_path);
            }
            return res.report.pass ? exit_ok : exit_failure;
        }
        if (*hard_mwm) {
            if (!algo.empty() && algo != "mwm") throw UsageError("only the ordinal algorithm 'mwm' can be compared on I1/I2");
            Rational eps = parse_rational_option(eps_text, "--eps");
            Rational delta = parse_rational_option(delta_text, "--delta");
            std::optional<Rational> base;
            if (!base_text.empty()) base = parse_rational_option(base_text, "--base");
            auto res = run_hard_mwm(n, eps, base, delta);
            print_summary(res.arithmetic);
            print_summary(res.geometric);
            std::cout << "C=" << res.base << " identical signatures=" << (res.identical_signatures ? "yes" : "no")
                      << " bound(delta=" << delta << ")=" << res.bound << " (" << res.bound.to_double() << ")\n";
            if (!report_path.empty()) {
                nlohmann::json j{{"I1", to_json(res.arithmetic)}, {"I2", to_json(res.geometric)}, {"C", res.base.str()},
                                 {"identical_signatures", res.identical_signatures}, {"bound", res.bound.str()},
                                 {"delta", delta.str()}};
                write_json(j, report_path);
            }
            bool ok = res.identical_signatures && res.arithmetic.pass && res.geometric.pass;
            return ok ? exit_ok : exit_failure;
        }
        if (*round) {
            auto stream = parse_stream(read_file(instance));
            auto outcome = run_algorithm(algo, stream, false);
            auto r = evaluate(algo, stream, instance, false);
            auto plan = compile(outcome.state.trace());
            bool ok = true;
            if (exact) {
                auto ex = exact_distribution(plan);
                std::cout << "exact distribution over " << plan.steps.size() << " steps: "
                          << (ex.lossless ? "matches x at every time" : "MISMATCH") << '\n';
                for (const auto& m : ex.merges)
                    std::cout << "  merge edge " << m.edge.arrival() << ": Pr[u]=" << m.p_u << " Pr[v]=" << m.p_v
                              << " Pr[u,v]=" << m.p_uv << (m.independent() ? " independent" : " DEPENDENT") << '\n';
                ok = ex.lossless;
            }
            auto mc = attach_monte_carlo(r, outcome, trials, seed);
            std::cout << "edge  x  freq  z\n";
            for (const auto& m : *r.monte_carlo)
                std::cout << m.edge.arrival() << ' ' << m.x << ' ' << m.freq << ' ' << m.z << '\n';
            if (outcome.weights.empty())
                std::cout << "mean size " << mc.mean_size() << " vs fractional " << outcome.primal().to_double() << '\n';
            else
                std::cout << "mean weight " << mc.mean_weight() << " vs fractional " << outcome.primal().to_double() << '\n';
            if (!report_path.empty()) write_json(to_json(r), report_path);
            ok = ok && r.flags.empty();
            return ok ? exit_ok : exit_failure;
        }
        if (*suite) {
            auto items = parse_suite(nlohmann::json::parse(read_file(config)));
            // Instance paths are relative to the config file.
            auto base = std::filesystem::path(config).parent_path();
            for (auto& it : items)
                if (it.file && std::filesystem::path(*it.file).is_relative()) it.file = (base / *it.file).string();
            auto reports = run_suite(items, {threads, timing});
            nlohmann::json j = nlohmann::json::array();
            bool ok = true;
            for (const auto& r : reports) {
                j.push_back(to_json(r));
                ok = ok && r.pass;
            }
            write_json(j, report_path);
            if (!report_path.empty()) {
                std::size_t failed = 0;
                for (const auto& r : reports) failed += r.pass ? 0 : 1;
                std::cout << reports.size() << " runs, " << failed << " failed\n";
            }
            return ok ? exit_ok : exit_failure;
        }
        if (*gen) {
            InstanceStream s;
            if (*gen_tree) {
                s = gen_random_growing_tree(n, seed);
                if (weighted) s = with_random_weights(std::move(s), seed);
            } else if (*gen_forest) {
                s = gen_random_forest(n, parse_rational_option(bias_text, "--merge-bias"), seed);
            } else if (*gen_hmcm) {
                s = gen_hard_mcm_static(n);
            } else {
                if (!base_text.empty()) s = gen_hard_mwm(n, GeometricWeights{parse_rational_option(base_text, "--base")});
                else s = gen_hard_mwm(n, ArithmeticWeights{parse_rational_option(eps_text, "--eps")});
            }
            std::string text = serialize_stream(s);
            if (out_path.empty() || out_path == "-") std::cout << text;
            else {
                std::ofstream out(out_path);
                if (!out) throw UsageError("cannot write '" + out_path + "'");
                out << text;
            }
            return exit_ok;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return status;
}
