#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace fdmatch;

namespace {

PrimalValue total(const Rational& p)
{
    PrimalValue v;
    v.total = p;
    return v;
}

} // namespace

TEST(WeakDuality, GlobalEquality)
{
    DualSnapshot snap;
    snap.alpha = {Rational(1, 3), Rational(2, 3)};
    EXPECT_TRUE(check_weak_duality(total(Rational(1)), snap, Rational(0), false).pass);
}

TEST(WeakDuality, ComponentSurplusEquality)
{
    DualSnapshot snap;
    snap.alpha = {Rational(0), Rational(6, 8), Rational(0)};
    snap.component = std::vector<std::uint32_t>{0, 0, 0};
    PrimalValue p;
    p.total = Rational(1);
    p.by_component[0] = Rational(1);
    EXPECT_TRUE(check_weak_duality(p, snap, Rational(2, 8), true).pass);
}

TEST(WeakDuality, MissingSurplusFails)
{
    DualSnapshot snap;
    snap.alpha = {Rational(5, 8)};
    EXPECT_FALSE(check_weak_duality(total(Rational(5, 8)), snap, Rational(2, 8), false).pass);
}

TEST(WeakDuality, UncertainCountsTowardDual)
{
    DualSnapshot snap;
    snap.alpha = {Rational(2, 8), Rational(2, 8)};
    snap.uncertain.push_back({EdgeId{0}, VertexId{0}, VertexId{1}, Rational(1, 8)});
    EXPECT_EQ(snap.dual_value(), Rational(5, 8));
    EXPECT_FALSE(check_weak_duality(total(Rational(4, 8)), snap, Rational(0), false).pass);
}

TEST(WeakDuality, PerComponentNeedsPartition)
{
    DualSnapshot snap;
    EXPECT_THROW(check_weak_duality(total(Rational(1)), snap, Rational(0), true), UsageError);
}

TEST(WeakDuality, FailingComponentIsNamedAndExemptionHonoured)
{
    DualSnapshot snap;
    snap.alpha = {Rational(6, 8), Rational(0), Rational(6, 8), Rational(0)};
    snap.component = std::vector<std::uint32_t>{0, 0, 2, 2};
    PrimalValue p;
    p.total = Rational(2);
    p.by_component[0] = Rational(1);
    p.by_component[2] = Rational(1);
    EXPECT_TRUE(check_weak_duality(p, snap, Rational(2, 8), true).pass);
    p.by_component[2] = Rational(7, 8);
    auto r = check_weak_duality(p, snap, Rational(2, 8), true);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.failing_components, std::vector<std::uint32_t>{2});
    snap.exempt_components.insert(2);
    EXPECT_TRUE(check_weak_duality(p, snap, Rational(2, 8), true).pass);
}

TEST(Feasibility, Examples)
{
    DualSnapshot thirds;
    thirds.alpha = {Rational(1, 3), Rational(1, 3)};
    std::vector<EdgeView> e{{EdgeId{0}, VertexId{0}, VertexId{1}, Rational(1)}};
    EXPECT_TRUE(check_feasibility(Rational(2, 3), e, thirds).pass);

    DualSnapshot merge;
    merge.alpha = {Rational(2, 8), Rational(2, 8)};
    merge.uncertain.push_back({EdgeId{0}, VertexId{0}, VertexId{1}, Rational(1, 8)});
    EXPECT_TRUE(check_feasibility(Rational(5, 8), e, merge).pass);
    merge.uncertain.clear();
    EXPECT_FALSE(check_feasibility(Rational(5, 8), e, merge).pass);

    DualSnapshot heavy;
    heavy.alpha = {Rational(3, 2), Rational(0)};
    std::vector<EdgeView> w{{EdgeId{0}, VertexId{0}, VertexId{1}, Rational(4)}};
    auto r = check_feasibility(Rational(1, 2), w, heavy);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.violated, std::vector<EdgeId>{EdgeId{0}});
}

TEST(AuditRun, TreeSpinePasses)
{
    TreeMatcher m;
    EXPECT_TRUE(audit_run(m, gen_hard_mcm_static(100)).pass());
}

TEST(AuditRun, ForestSeedPasses)
{
    ForestMatcher m;
    auto report = audit_run(m, gen_random_forest(50, Rational(1, 2), 2024));
    EXPECT_EQ(report.events.size(), 50u);
    EXPECT_TRUE(report.pass());
}

TEST(AuditRun, ZeroedDualsFail)
{
    auto zero = [](DualSnapshot& s) {
        for (auto& a : s.alpha) a = Rational(0);
        s.uncertain.clear();
    };
    TreeMatcher tree;
    auto r = audit_run(tree, gen_hard_mcm_static(5), zero);
    EXPECT_FALSE(r.pass());
    EXPECT_EQ(r.failures(), r.events.size());
    EXPECT_FALSE(r.events.back().violated_edges.empty());

    ForestMatcher forest;
    auto f = audit_run(forest, gen_random_forest(30, Rational(1, 2), 5), zero);
    EXPECT_FALSE(f.pass());
}

TEST(AuditRun, InflatedDualsBreakDuality)
{
    auto inflate = [](DualSnapshot& s) { s.alpha.at(0) += Rational(1); };
    TreeMatcher tree;
    auto r = audit_run(tree, gen_hard_mcm_static(3), inflate);
    EXPECT_FALSE(r.events.back().weak_duality);
    EXPECT_TRUE(r.events.back().feasibility);
}

TEST(AuditRun, IsPure)
{
    auto s = gen_random_forest(40, Rational(1, 4), 8);
    ForestMatcher a, b;
    auto ra = audit_run(a, s);
    auto rb = audit_run(b, s);
    ASSERT_EQ(ra.events.size(), rb.events.size());
    for (std::size_t i = 0; i < ra.events.size(); ++i) {
        EXPECT_EQ(ra.events[i].pass(), rb.events[i].pass());
        EXPECT_EQ(ra.events[i].notes, rb.events[i].notes);
    }
}
