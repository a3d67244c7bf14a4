#pragma once

#include "fdmatch/instance.hpp"
#include "fdmatch/random.hpp"

#include <string>
#include <variant>

namespace fdmatch {

/// Spine instance: u1..u_{n+1}, v1..v_n, arriving (u_i, v_i), (u_i, u_{i+1}) for i = 1..n.
inline InstanceStream gen_hard_mcm_static(std::size_t n)
{
    if (n == 0) throw InvalidParameter("hard instance needs n >= 1");
    StreamBuilder b(ArrivalModel::GrowingTree, false);
    for (std::size_t i = 1; i <= n; ++i) {
        std::string ui = "u" + std::to_string(i);
        b.edge(ui, "v" + std::to_string(i));
        b.edge(ui, "u" + std::to_string(i + 1));
    }
    return std::move(b).build();
}

/// Leg (u_i, v_i) weighs 1 + (i-1)eps, spine (u_i, u_{i+1}) weighs 1 + i*eps.
struct ArithmeticWeights {
    Rational epsilon;
};
/// Leg (u_i, v_i) weighs C^{i-1}, spine (u_i, u_{i+1}) weighs C^i.
struct GeometricWeights {
    Rational base;
};
using HardMwmVariant = std::variant<ArithmeticWeights, GeometricWeights>;

inline InstanceStream gen_hard_mwm(std::size_t n, const HardMwmVariant& variant)
{
    if (n == 0) throw InvalidParameter("hard instance needs n >= 1");
    if (auto* a = std::get_if<ArithmeticWeights>(&variant); a && a->epsilon.sign() <= 0)
        throw InvalidParameter("epsilon must be positive");
    if (auto* g = std::get_if<GeometricWeights>(&variant); g && g->base <= Rational(1))
        throw InvalidParameter("C must exceed 1");

    auto leg = [&](std::size_t i) {
        if (auto* a = std::get_if<ArithmeticWeights>(&variant))
            return Rational(1) + Rational(i - 1) * a->epsilon;
        return pow(std::get<GeometricWeights>(variant).base, static_cast<unsigned>(i - 1));
    };
    auto spine = [&](std::size_t i) {
        if (auto* a = std::get_if<ArithmeticWeights>(&variant))
            return Rational(1) + Rational(i) * a->epsilon;
        return pow(std::get<GeometricWeights>(variant).base, static_cast<unsigned>(i));
    };

    StreamBuilder b(ArrivalModel::GrowingTree, true);
    for (std::size_t i = 1; i <= n; ++i) {
        std::string ui = "u" + std::to_string(i);
        b.edge(ui, "v" + std::to_string(i), leg(i));
        b.edge(ui, "u" + std::to_string(i + 1), spine(i));
    }
    return std::move(b).build();
}

inline InstanceStream gen_random_growing_tree(std::size_t n_edges, std::uint64_t seed)
{
    if (n_edges == 0) throw InvalidParameter("need at least one edge");
    auto rng = make_engine(seed);
    StreamBuilder b(ArrivalModel::GrowingTree, false);
    b.edge("t0", "t1");
    for (std::size_t i = 1; i < n_edges; ++i) {
        std::size_t existing = b.peek().vertex_count();
        VertexId parent{static_cast<std::uint32_t>(uniform_index(rng, existing))};
        VertexId child = b.vertex("t" + std::to_string(existing));
        b.edge(parent, child);
    }
    return std::move(b).build();
}

/// Each step: with probability `merge_bias` join two distinct components
/// (falls back to growth when only one exists); otherwise start an isolated
/// edge with probability 1/4 or attach a fresh leaf.
inline InstanceStream gen_random_forest(std::size_t n_edges, const Rational& merge_bias, std::uint64_t seed)
{
    if (n_edges == 0) throw InvalidParameter("need at least one edge");
    if (merge_bias.sign() < 0 || merge_bias > Rational(1)) throw InvalidParameter("merge_bias must lie in [0,1]");
    auto rng = make_engine(seed);
    ExactCoin merge_coin(merge_bias);
    ExactCoin isolated_coin(Rational(1, 4));
    StreamBuilder b(ArrivalModel::Forest, false);
    ForestGraph graph;
    auto fresh = [&] { return b.vertex("f" + std::to_string(b.peek().vertex_count())); };
    auto emit = [&](VertexId x, VertexId y) {
        graph.ensure_vertex(x);
        graph.ensure_vertex(y);
        graph.add(x, y);
        b.edge(x, y);
    };

    for (std::size_t i = 0; i < n_edges; ++i) {
        std::size_t count = b.peek().vertex_count();
        if (count == 0) {
            auto x = fresh();
            emit(x, fresh());
            continue;
        }
        if (merge_coin.flip(rng)) {
            VertexId a{static_cast<std::uint32_t>(uniform_index(rng, count))};
            std::vector<VertexId> others;
            for (std::uint32_t w = 0; w < count; ++w)
                if (graph.component(VertexId{w}) != graph.component(a)) others.push_back(VertexId{w});
            if (!others.empty()) {
                emit(a, others[uniform_index(rng, others.size())]);
                continue;
            }
            VertexId parent{static_cast<std::uint32_t>(uniform_index(rng, count))};
            emit(parent, fresh());
            continue;
        }
        if (isolated_coin.flip(rng)) {
            auto x = fresh();
            emit(x, fresh());
        } else {
            VertexId parent{static_cast<std::uint32_t>(uniform_index(rng, count))};
            emit(parent, fresh());
        }
    }
    return std::move(b).build();
}

/// Replaces every weight with an independent uniform rational p/q,
/// p in [1, max_numerator], q in [1, max_denominator].
inline InstanceStream with_random_weights(InstanceStream stream, std::uint64_t seed, std::uint32_t max_numerator = 100,
                                          std::uint32_t max_denominator = 10)
{
    auto rng = make_engine(seed, 1);
    stream.weighted = true;
    for (auto& ev : stream.events) {
        auto p = static_cast<std::int64_t>(1 + uniform_index(rng, max_numerator));
        auto q = static_cast<std::int64_t>(1 + uniform_index(rng, max_denominator));
        ev.weight = Rational(p, q);
    }
    return stream;
}

} // namespace fdmatch
