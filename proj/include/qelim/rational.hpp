#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qelim {

// Exact arbitrary-precision scalars. mpq_class keeps values in lowest terms
// with a positive denominator after every arithmetic operation.
using Integer = mpz_class;
using Rational = mpq_class;

namespace detail {

inline bool is_digit_string(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

// Accepts "p" or "p/q" with an optional leading '-' on p and q > 0.
inline bool looks_like_rational(std::string_view text) {
    std::string_view s = text;
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return detail::is_digit_string(s);
    return detail::is_digit_string(s.substr(0, slash)) &&
           detail::is_digit_string(s.substr(slash + 1));
}

inline Rational parse_rational(std::string_view text) {
    if (!looks_like_rational(text))
        throw std::invalid_argument("not a rational literal: " + std::string(text));
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        Integer den(std::string(text.substr(slash + 1)));
        if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    }
    Rational q(std::string(text), 10);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline int sign(const Rational& q) { return sgn(q); }

// Number of bits in |n|; zero has size 0.
inline std::size_t bit_size(const Integer& n) {
    if (n == 0) return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

} // namespace qelim
