#pragma once

#include "fdmatch/errors.hpp"
#include "fdmatch/rational.hpp"

#include <cstdint>
#include <random>

namespace fdmatch {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; maps (seed, stream index) to well-separated seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index = 0)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t index = 0) { return Engine(mix_seed(seed, index)); }

inline std::size_t uniform_index(Engine& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// A probability p/q in [0,1] with word-sized numerator and denominator,
/// sampled by comparing a uniform draw from [0, q) against p.
class ExactCoin {
public:
    ExactCoin() = default;
    explicit ExactCoin(const Rational& p)
    {
        if (p.sign() < 0 || p > Rational(1)) throw InvalidParameter("probability outside [0,1]: " + p.str());
        if (!p.value().get_den().fits_ulong_p()) throw InvalidParameter("probability denominator too large: " + p.str());
        num_ = p.value().get_num().get_ui();
        den_ = p.value().get_den().get_ui();
    }

    bool flip(Engine& rng) const
    {
        if (num_ == 0) return false;
        if (num_ == den_) return true;
        return std::uniform_int_distribution<std::uint64_t>(0, den_ - 1)(rng) < num_;
    }

    bool certain() const { return num_ == den_; }
    bool impossible() const { return num_ == 0; }

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

} // namespace fdmatch
