#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <ranges>

using namespace fdmatch;

namespace {

const PlanStep& nth_of_kind(const RoundingPlan& plan, PlanStep::Kind kind, std::size_t n = 0)
{
    for (const auto& s : plan.steps)
        if (s.kind == kind && n-- == 0) return s;
    throw std::out_of_range("no such plan step");
}

// The last non-trivial merge of the plan.
const PlanStep& merge_step(const RoundingPlan& plan)
{
    for (const auto& s : std::views::reverse(plan.steps))
        if (s.kind == PlanStep::Kind::Match && s.tag && std::holds_alternative<NonTrivialMerge>(*s.tag)) return s;
    throw std::out_of_range("no merge step");
}

RoundingPlan tree_plan(const InstanceStream& s) { return compile(fixtures::run_tree(s).state().trace()); }
RoundingPlan forest_plan(const InstanceStream& s) { return compile(fixtures::run_forest(s).state().trace()); }

InstanceStream two_edge_path() { return fixtures::stream(ArrivalModel::GrowingTree, {{"a", "b"}, {"b", "c"}}); }

} // namespace

TEST(Compile, DisposalDropProbability)
{
    auto plan = tree_plan(two_edge_path());
    const auto& d = nth_of_kind(plan, PlanStep::Kind::Dispose);
    EXPECT_EQ(d.probability, Rational(2, 3));
    EXPECT_EQ(Rational(1) - d.probability, Rational(1, 3));
}

TEST(Compile, GrowthIsCertainWhenParentFree)
{
    auto plan = tree_plan(two_edge_path());
    const auto& m = nth_of_kind(plan, PlanStep::Kind::Match, 1);
    EXPECT_EQ(m.gamma, Rational(2, 3));
    EXPECT_EQ(m.probability, Rational(1));
}

TEST(Compile, KnownMergeProbabilities)
{
    EXPECT_EQ(detail::conditional_match(Rational(3, 8), Rational(3, 8), Rational(3, 8), ""), Rational(24, 25));
    EXPECT_EQ(detail::conditional_match(Rational(1, 8), Rational(3, 8), Rational(5, 8), ""), Rational(8, 15));

    auto two_leaves_plan = forest_plan(fixtures::two_leaves_merge());
    const auto& two_leaves = merge_step(two_leaves_plan);
    EXPECT_EQ(two_leaves.probability, Rational(24, 25));
    auto unsafe_plan = forest_plan(fixtures::leaf_and_unsafe_b_merge());
    const auto& unsafe = merge_step(unsafe_plan);
    EXPECT_EQ((std::array<Rational, 3>{unsafe.gamma, unsafe.mu_u, unsafe.mu_v}),
              (std::array<Rational, 3>{Rational(1, 8), Rational(3, 8), Rational(5, 8)}));
    EXPECT_EQ(unsafe.probability, Rational(8, 15));
}

TEST(Compile, RejectsBrokenConditions)
{
    const VertexId a{0}, b{1}, c{2}, d{3};
    FracState half_isolated;
    EdgeId e1 = half_isolated.arrive(a, b);
    half_isolated.match(e1, Rational(1, 2), IsolatedEdge{});
    EdgeId e2 = half_isolated.arrive(c, d);
    half_isolated.match(e2, Rational(1), IsolatedEdge{});
    EdgeId e3 = half_isolated.arrive(b, c);
    half_isolated.match(e3, Rational(0), NonTrivialMerge{});
    EXPECT_THROW(compile(half_isolated.trace()), LemmaConditionError);

    FracState crowded;
    EdgeId f1 = crowded.arrive(a, b);
    crowded.match(f1, Rational(1, 2), GrowingEdge{a, b});
    EdgeId f2 = crowded.arrive(c, d);
    crowded.match(f2, Rational(1, 2), GrowingEdge{c, d});
    EdgeId f3 = crowded.arrive(b, c);
    crowded.match(f3, Rational(1, 2), NonTrivialMerge{});
    EXPECT_THROW(compile(crowded.trace()), LemmaConditionError);
}

TEST(Compile, ZeroMatchesAreNoOps)
{
    auto plan = forest_plan(fixtures::stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"a2", "b2"}, {"b2", "c2"}, {"b", "b2"}}));
    const auto& m = plan.steps.back();
    EXPECT_EQ(m.gamma, Rational(0));
    EXPECT_TRUE(m.ops.empty());
}

TEST(Sample, TwoEdgePathExact)
{
    auto plan = tree_plan(two_edge_path());
    auto exact = exact_distribution(plan);
    EXPECT_TRUE(exact.lossless);
    EXPECT_EQ(exact.timeline.back().probability, (std::vector<Rational>{Rational(1, 3), Rational(2, 3)}));
}

TEST(Sample, ZeroEdgeNeverMatched)
{
    auto s = fixtures::stream(ArrivalModel::Forest, {{"a", "b"}, {"b", "c"}, {"a2", "b2"}, {"b2", "c2"}, {"b", "b2"}});
    auto plan = forest_plan(s);
    for (std::uint64_t seed = 0; seed < 200; ++seed) EXPECT_FALSE(sample(plan, seed).matched[4]);
}

TEST(Sample, DeterministicPlanIgnoresSeed)
{
    auto plan = tree_plan(fixtures::stream(ArrivalModel::GrowingTree, {{"a", "b"}}));
    auto first = sample(plan, 1).matching();
    for (std::uint64_t seed = 2; seed < 50; ++seed) EXPECT_EQ(sample(plan, seed).matching(), first);
    EXPECT_EQ(first, std::vector<EdgeId>{EdgeId{0}});
}

TEST(Sample, AlwaysAMatching)
{
    auto s = gen_random_forest(80, Rational(1, 2), 17);
    auto plan = forest_plan(s);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto run = sample(plan, seed);
        std::vector<int> deg(plan.vertex_count, 0);
        for (EdgeId e : run.matching()) {
            ++deg[plan.ends[e.index].first.value];
            ++deg[plan.ends[e.index].second.value];
        }
        for (int dgr : deg) ASSERT_LE(dgr, 1);
    }
}

TEST(MonteCarlo, TwoEdgePathWithinBand)
{
    auto plan = tree_plan(two_edge_path());
    auto mc = monte_carlo(plan, 100000, 42);
    EXPECT_EQ(mc.trials, 100000u);
    EXPECT_TRUE(within_binomial_band(Rational(1, 3), mc.edge_counts[0], mc.trials));
    EXPECT_NEAR(mc.frequency(EdgeId{0}), 1.0 / 3.0, 3 * std::sqrt(2.0 / 9.0 * 1e-5));
    EXPECT_TRUE(within_binomial_band(Rational(2, 3), mc.edge_counts[1], mc.trials));
    EXPECT_DOUBLE_EQ(mc.mean_size(), 1.0); // exactly one of the two edges, always
}

TEST(MonteCarlo, SingleTrialFrequencies)
{
    auto plan = forest_plan(gen_random_forest(20, Rational(1, 2), 3));
    auto mc = monte_carlo(plan, 1, 9);
    for (std::uint32_t i = 0; i < plan.edge_count(); ++i) {
        double f = mc.frequency(EdgeId{i});
        EXPECT_TRUE(f == 0.0 || f == 1.0);
    }
    EXPECT_THROW(monte_carlo(plan, 0, 9), InvalidParameter);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeCounts)
{
    auto plan = forest_plan(gen_random_forest(40, Rational(1, 2), 12));
    auto one = monte_carlo(plan, 5000, 77, {}, 1);
    auto four = monte_carlo(plan, 5000, 77, {}, 4);
    EXPECT_EQ(one.edge_counts, four.edge_counts);
    EXPECT_EQ(one.size_sum, four.size_sum);
    ASSERT_EQ(one.merges.size(), four.merges.size());
    for (std::size_t i = 0; i < one.merges.size(); ++i) EXPECT_EQ(one.merges[i].both_matched, four.merges[i].both_matched);
}

TEST(MonteCarlo, WeightedMeanTracksPrimal)
{
    auto s = with_random_weights(gen_random_growing_tree(30, 5), 5);
    auto m = run_mwm(s);
    auto plan = compile(m.state().trace());
    auto mc = monte_carlo(plan, 40000, 3, m.weights());
    double p = m.state().primal_value(m.weights()).to_double();
    EXPECT_NEAR(mc.mean_weight(), p, 3 * mc.weight_stddev() / std::sqrt(40000.0));
}

TEST(MonteCarlo, MergeEndpointsUncorrelated)
{
    auto s = gen_random_forest(60, Rational(1, 2), 51);
    auto plan = forest_plan(s);
    auto mc = monte_carlo(plan, 40000, 8);
    ASSERT_FALSE(mc.merges.empty());
    for (const auto& m : mc.merges) {
        double n = static_cast<double>(mc.trials);
        double pu = m.u_matched / n, pv = m.v_matched / n, puv = m.both_matched / n;
        // Standard error of the covariance estimate is at most about 1/(2 sqrt(n)).
        EXPECT_LE(std::abs(puv - pu * pv), 4 * 0.5 / std::sqrt(n)) << "edge " << m.edge.arrival();
    }
}

TEST(Exact, FixturesAreLossless)
{
    std::vector<std::pair<std::string, RoundingPlan>> plans{
        {"path", tree_plan(fixtures::path6())},
        {"two leaves", forest_plan(fixtures::two_leaves_merge())},
        {"safe B", forest_plan(fixtures::leaf_and_safe_b_merge())},
        {"unsafe B", forest_plan(fixtures::leaf_and_unsafe_b_merge())},
        {"trivial", forest_plan(fixtures::trivial_merge())},
        {"lone edges", forest_plan(fixtures::lone_edges_merge())},
    };
    for (const auto& [name, plan] : plans) {
        auto r = exact_distribution(plan);
        EXPECT_TRUE(r.lossless) << name << " first mismatch at " << r.first_mismatch_time.value_or(-1);
        for (const auto& m : r.merges) EXPECT_TRUE(m.independent()) << name;
        for (const auto& tp : r.timeline) EXPECT_EQ(tp.probability, tp.fraction) << name << " time " << tp.time;
    }
}

TEST(Exact, TrivialMergeTimeline)
{
    auto plan = forest_plan(fixtures::trivial_merge());
    auto r = exact_distribution(plan);
    const auto& last = r.timeline.back();
    EXPECT_EQ(last.probability[3], Rational(5, 8)); // x-y
    EXPECT_EQ(last.probability[4], Rational(3, 8)); // y-c
}

TEST(Exact, SizeLimit)
{
    auto plan = tree_plan(gen_random_growing_tree(40, 1));
    EXPECT_THROW(exact_distribution(plan), SizeLimit);
}

TEST(Triples, KnownTriplesDominate)
{
    EXPECT_TRUE(dominated_by_known_triple({Rational(3, 8), Rational(3, 8), Rational(3, 8)}));
    EXPECT_TRUE(dominated_by_known_triple({Rational(1, 8), Rational(5, 8), Rational(2, 8)}));
    EXPECT_FALSE(dominated_by_known_triple({Rational(1, 8), Rational(5, 8), Rational(5, 8)}));
    EXPECT_FALSE(dominated_by_known_triple({Rational(2, 8), Rational(0), Rational(0)}));
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        for (const auto& t : merge_triples(forest_plan(gen_random_forest(80, Rational(1, 2), seed))))
            EXPECT_TRUE(dominated_by_known_triple(t)) << t[0] << " " << t[1] << " " << t[2];
}
