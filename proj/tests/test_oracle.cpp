#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace fdmatch;

namespace {

// Test-side reference: branch on the first remaining edge (take it or skip it).
Rational reference_max(const OfflineGraph& g, std::size_t from, std::vector<char>& busy)
{
    if (from == g.edges.size()) return Rational(0);
    Rational best = reference_max(g, from + 1, busy);
    auto [u, v] = g.edges[from];
    if (!busy[u.value] && !busy[v.value]) {
        busy[u.value] = busy[v.value] = 1;
        Rational w = g.weights.empty() ? Rational(1) : g.weights[from];
        best = max(best, w + reference_max(g, from + 1, busy));
        busy[u.value] = busy[v.value] = 0;
    }
    return best;
}

Rational reference_max(const OfflineGraph& g)
{
    std::vector<char> busy(g.vertices, 0);
    return reference_max(g, 0, busy);
}

OfflineGraph from_parents(const std::vector<std::uint32_t>& parent)
{
    OfflineGraph g;
    g.vertices = parent.size();
    for (std::uint32_t i = 1; i < parent.size(); ++i) g.edges.emplace_back(VertexId{parent[i]}, VertexId{i});
    return g;
}

} // namespace

TEST(Oracle, SpineOptimum)
{
    for (std::size_t n = 1; n <= 50; ++n)
        EXPECT_EQ(max_cardinality_forest(OfflineGraph::from_stream(gen_hard_mcm_static(n))), n);
}

TEST(Oracle, SmallCardinalityCases)
{
    auto single = OfflineGraph::from_stream(fixtures::stream(ArrivalModel::Forest, {{"a", "b"}}));
    EXPECT_EQ(max_cardinality_forest(single), 1u);
    for (std::size_t k = 1; k <= 6; ++k) {
        std::vector<std::uint32_t> star(k + 1, 0);
        EXPECT_EQ(max_cardinality_forest(from_parents(star)), 1u);
    }
    EXPECT_EQ(max_cardinality_forest(OfflineGraph{}), 0u);
}

TEST(Oracle, WeightedCases)
{
    for (std::size_t n : {1, 2, 5, 20}) {
        Rational eps(1, 1000);
        Rational nn(static_cast<long>(n));
        auto i1 = gen_hard_mwm(n, ArithmeticWeights{eps});
        EXPECT_EQ(offline_optimum(i1), nn + (nn * nn - nn + Rational(2)) / Rational(2) * eps) << "n=" << n;
    }
    auto single = fixtures::weighted({{"a", "b", Rational(7, 3)}});
    EXPECT_EQ(offline_optimum(single), Rational(7, 3));
    auto path = fixtures::weighted({{"a", "b", Rational(3)}, {"b", "c", Rational(1)}, {"c", "d", Rational(3)}});
    EXPECT_EQ(offline_optimum(path), Rational(6));
    EXPECT_EQ(reference_max(OfflineGraph::from_stream(path)), Rational(6));
}

TEST(Oracle, BruteForceOnGeneralGraphs)
{
    OfflineGraph triangle;
    triangle.vertices = 3;
    triangle.edges = {{VertexId{0}, VertexId{1}}, {VertexId{1}, VertexId{2}}, {VertexId{0}, VertexId{2}}};
    EXPECT_EQ(brute_force(triangle), Rational(1));
    EXPECT_EQ(brute_force(OfflineGraph{}), Rational(0));
    EXPECT_THROW(max_cardinality_forest(triangle), ModelViolation);

    OfflineGraph big;
    big.vertices = 18;
    for (std::uint32_t i = 1; i < 18; ++i) big.edges.emplace_back(VertexId{0}, VertexId{i});
    EXPECT_THROW(brute_force(big), SizeLimit);
}

TEST(Oracle, AgreesWithReferenceOnAllSmallTrees)
{
    std::size_t trees = 0;
    for (std::size_t vertices = 2; vertices <= 7; ++vertices) {
        fixtures::for_each_parent_array(vertices, [&](const std::vector<std::uint32_t>& parent) {
            auto g = from_parents(parent);
            Rational ref = reference_max(g);
            ASSERT_EQ(Rational(max_cardinality_forest(g)), ref);
            ASSERT_EQ(brute_force(g), ref);
            ++trees;
        });
    }
    EXPECT_EQ(trees, 1u + 2u + 6u + 24u + 120u + 720u);
}

TEST(Oracle, AgreesWithReferenceOnWeightedForests)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto s = with_random_weights(gen_random_forest(1 + seed % 14, Rational(1, 3), seed), seed);
        auto g = OfflineGraph::from_stream(s);
        Rational ref = reference_max(g);
        ASSERT_EQ(max_weight_forest(g), ref) << "seed " << seed;
        ASSERT_EQ(brute_force(g), ref) << "seed " << seed;
    }
}

TEST(Oracle, DeepPathDoesNotRecurse)
{
    std::vector<std::uint32_t> parent(200001);
    for (std::uint32_t i = 1; i < parent.size(); ++i) parent[i] = i - 1;
    EXPECT_EQ(max_cardinality_forest(from_parents(parent)), 100000u);
}
