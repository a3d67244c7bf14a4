#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <string_view>

namespace fdmatch {

/// Exact fraction over arbitrary-precision integers, always in lowest terms
/// with a positive denominator.
class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I value) // NOLINT(google-explicit-constructor)
    {
        set_integer(value, value_.get_num_mpz_t());
    }

    template <std::integral N, std::integral D>
    Rational(N numerator, D denominator)
    {
        mpz_class num;
        mpz_class den;
        set_integer(numerator, num.get_mpz_t());
        set_integer(denominator, den.get_mpz_t());
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        value_ = mpq_class(num, den);
        value_.canonicalize();
    }

    explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    /// Accepts "p", "-p" or "p/q" with decimal digits only.
    static std::optional<Rational> parse(std::string_view text)
    {
        if (text.empty()) return std::nullopt;
        auto slash = text.find('/');
        auto digits_ok = [](std::string_view s, bool allow_sign) {
            if (allow_sign && !s.empty() && s.front() == '-') s.remove_prefix(1);
            if (s.empty()) return false;
            for (char c : s)
                if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            return true;
        };
        std::string_view num = text.substr(0, slash);
        std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
        if (!digits_ok(num, true) || !digits_ok(den, false)) return std::nullopt;
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        return Rational(mpq_class(n, d));
    }

    const mpq_class& value() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    /// Canonical text: "p" for integers, "p/q" otherwise.
    std::string str() const { return value_.get_str(); }
    double to_double() const { return value_.get_d(); }

    bool is_zero() const { return sgn(value_) == 0; }
    int sign() const { return sgn(value_); }

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o)
    {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        value_ /= o.value_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    template <std::integral I>
    static void set_integer(I value, mpz_ptr out)
    {
        if constexpr (std::is_signed_v<I>) {
            if (value >= 0) {
                mpz_set_ui(out, static_cast<unsigned long>(value));
            } else {
                // -(value + 1) avoids overflow at the minimum value.
                mpz_set_ui(out, static_cast<unsigned long>(-(value + 1)));
                mpz_add_ui(out, out, 1);
                mpz_neg(out, out);
            }
        } else {
            mpz_set_ui(out, static_cast<unsigned long>(value));
        }
    }

    mpq_class value_{0};
};

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

/// Integer power with a nonnegative exponent.
inline Rational pow(const Rational& base, unsigned exponent)
{
    mpz_class num;
    mpz_class den;
    mpz_pow_ui(num.get_mpz_t(), base.value().get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.value().get_den_mpz_t(), exponent);
    return Rational(mpq_class(num, den));
}

} // namespace fdmatch
