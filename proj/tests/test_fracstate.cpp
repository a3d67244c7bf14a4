#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace fdmatch;

namespace {

const VertexId a{0}, b{1}, c{2}, d{3};

} // namespace

TEST(FracState, TimesFollowArrivals)
{
    FracState s;
    EdgeId e1 = s.arrive(a, b);
    EXPECT_EQ(s.disposal_time(), 1);
    EXPECT_EQ(s.match_time(), 2);
    s.match(e1, Rational(1), IsolatedEdge{});
    EdgeId e2 = s.arrive(b, c);
    EXPECT_EQ(s.disposal_time(), 3);
    EXPECT_EQ(s.match_time(), 4);
    s.dispose(e1, Rational(1, 3));
    s.match(e2, Rational(2, 3), GrowingEdge{b, c});
    ASSERT_EQ(s.trace().size(), 3u);
    EXPECT_EQ(s.trace()[0].time, 2);
    EXPECT_EQ(s.trace()[1].time, 3);
    EXPECT_EQ(s.trace()[2].time, 4);
    EXPECT_THROW(s.arrive(c, b), StateError);
}

TEST(FracState, DisposalRecordsDeltaAndLambda)
{
    FracState s;
    EdgeId e1 = s.arrive(a, b);
    s.match(e1, Rational(1), IsolatedEdge{});
    EdgeId e2 = s.arrive(b, c);
    s.dispose(e1, Rational(1, 3));
    const auto& d1 = std::get<DisposeStep>(s.trace().back().action);
    EXPECT_EQ(d1.amount, Rational(2, 3));
    EXPECT_EQ(d1.from, Rational(1));
    EXPECT_THROW(s.dispose(e1, Rational(1, 2)), IllegalIncrease);
    EXPECT_THROW(s.dispose(EdgeId{9}, Rational(0)), StateError);
    s.match(e2, Rational(2, 3), GrowingEdge{b, c});
    EXPECT_THROW(s.dispose(e1, Rational(0)), StateError); // after the match of the same arrival

    FracState t;
    EdgeId f1 = t.arrive(a, b);
    t.match(f1, Rational(4, 8), IsolatedEdge{});
    t.arrive(b, c);
    t.dispose(f1, Rational(3, 8));
    const auto& d2 = std::get<DisposeStep>(t.trace().back().action);
    EXPECT_EQ(d2.amount, Rational(1, 8));
    EXPECT_EQ(d2.from, Rational(4, 8));
}

TEST(FracState, MatchRespectsCapacity)
{
    FracState s;
    EdgeId e1 = s.arrive(a, b);
    s.match(e1, Rational(1), IsolatedEdge{});
    EXPECT_EQ(s.load(a), Rational(1));
    EXPECT_EQ(s.load(b), Rational(1));
    EdgeId e2 = s.arrive(b, c);
    s.dispose(e1, Rational(1, 3));
    s.match(e2, Rational(2, 3), GrowingEdge{b, c});
    const auto& m = std::get<MatchStep>(s.trace().back().action);
    EXPECT_EQ(m.parent_load(), Rational(1, 3));

    FracState t;
    EdgeId f1 = t.arrive(a, b);
    t.match(f1, Rational(1, 2), IsolatedEdge{});
    EdgeId f2 = t.arrive(b, c);
    EXPECT_THROW(t.match(f2, Rational(2, 3), GrowingEdge{b, c}), PolytopeViolation);
    EXPECT_THROW(t.match(f1, Rational(0), IsolatedEdge{}), StateError);
}

TEST(FracState, PrimalValue)
{
    FracState empty;
    EXPECT_EQ(empty.primal_value(), Rational(0));

    FracState s;
    EdgeId e1 = s.arrive(a, b);
    s.match(e1, Rational(1), IsolatedEdge{});
    EdgeId e2 = s.arrive(b, c);
    s.dispose(e1, Rational(1, 3));
    s.match(e2, Rational(2, 3), GrowingEdge{b, c});
    EXPECT_EQ(s.primal_value(), Rational(1));

    FracState w;
    EdgeId g1 = w.arrive(a, b);
    w.match(g1, Rational(1, 2), IsolatedEdge{});
    EdgeId g2 = w.arrive(c, d);
    w.match(g2, Rational(1, 2), IsolatedEdge{});
    std::vector<Rational> weights{3, 2};
    EXPECT_EQ(w.primal_value(weights), Rational(5, 2));
}

TEST(FracState, ReplayReproducesState)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto s = gen_random_forest(60, Rational(1, 2), seed);
        auto m = fixtures::run_forest(s);
        auto again = FracState::replay(m.state().trace());
        EXPECT_TRUE(again == m.state());
        EXPECT_EQ(again.trace().size(), m.state().trace().size());
        for (std::size_t v = 0; v < m.state().vertex_count(); ++v)
            EXPECT_EQ(again.load(VertexId{static_cast<std::uint32_t>(v)}), m.state().load(VertexId{static_cast<std::uint32_t>(v)}));
    }
}

TEST(FracState, ReplayRejectsTamperedLoads)
{
    auto m = fixtures::run_tree(fixtures::path6());
    Trace trace = m.state().trace();
    for (auto& step : trace)
        if (auto* ms = std::get_if<MatchStep>(&step.action); ms && ms->edge.index == 3) ms->load_u += Rational(1, 3);
    EXPECT_THROW(FracState::replay(trace), StateError);
}

TEST(FracState, ExportTraceListsEverySteps)
{
    auto m = fixtures::run_tree(fixtures::path6());
    auto text = export_trace(m.state().trace());
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), m.state().trace().size());
    EXPECT_NE(text.find("3 dispose 1 delta=2/3 from=1"), std::string::npos);
    EXPECT_NE(text.find("4 match 2 growing gamma=2/3 loads=1/3,0"), std::string::npos);
}
