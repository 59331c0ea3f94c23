#pragma once

// Random formula generator with knobs in the style of randprsb: number of
// variables, tree depth, coefficient range, quantifier probability, seed.

#include "qelim/formula.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qelim {

// SplitMix64 (Steele, Lea, Flood 2014). Fixed arithmetic on uint64_t, so the
// stream is identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n), by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // True with probability p (exact for rational p).
    bool chance(const Rational& p) {
        if (p <= 0) return false;
        if (p >= 1) return true;
        // Compare a uniform draw in [0, den) against num.
        Integer den = p.get_den();
        Integer num = p.get_num();
        if (!den.fits_ulong_p()) throw std::invalid_argument("probability denominator too large");
        return below(den.get_ui()) < num.get_ui();
    }

private:
    std::uint64_t state_;
};

struct GenParams {
    int num_vars = 7;
    int depth = 12;
    std::int64_t coeff_min = -10;
    std::int64_t coeff_max = 10;
    Rational quantifier_prob{1, 4};
    std::uint64_t seed = 0;

    void validate() const {
        if (num_vars < 1) throw std::invalid_argument("num_vars must be >= 1");
        if (depth < 1) throw std::invalid_argument("depth must be >= 1");
        if (coeff_min > coeff_max) throw std::invalid_argument("coeff_min must be <= coeff_max");
        if (coeff_min == 0 && coeff_max == 0) throw std::invalid_argument("coefficient range is {0}");
        if (quantifier_prob < 0 || quantifier_prob > 1) throw std::invalid_argument("quant_prob must lie in [0,1]");
    }
};

inline std::string gen_var_name(int i) { return "x" + std::to_string(i); }

namespace detail {

class Generator {
public:
    explicit Generator(const GenParams& p) : p_(p), rng_(p.seed) {}

    // A tree of exactly the given depth (an atom has depth 1). Binary nodes
    // put one child at depth d-1 and draw the other's depth from [1, d-1].
    Formula node(int depth) {
        if (depth <= 1) return atom();
        if (rng_.chance(p_.quantifier_prob)) {
            std::vector<Var> vs{Var(gen_var_name(static_cast<int>(rng_.below(p_.num_vars))))};
            Formula body = node(depth - 1);
            return rng_.below(2) == 0 ? mk_exists(std::move(vs), std::move(body))
                                      : mk_forall(std::move(vs), std::move(body));
        }
        switch (rng_.below(3)) {
        case 0: return mk_not(node(depth - 1));
        default: {
            bool conj = rng_.below(2) == 0;
            int other = static_cast<int>(rng_.between(1, depth - 1));
            bool deep_first = rng_.below(2) == 0;
            Formula a = node(deep_first ? depth - 1 : other);
            Formula b = node(deep_first ? other : depth - 1);
            return conj ? mk_and({std::move(a), std::move(b)}) : mk_or({std::move(a), std::move(b)});
        }
        }
    }

private:
    Formula atom() {
        while (true) {
            LinearTerm t(Rational(rng_.between(p_.coeff_min, p_.coeff_max)));
            for (int i = 0; i < p_.num_vars; ++i)
                t.add_term(Var(gen_var_name(i)), Rational(rng_.between(p_.coeff_min, p_.coeff_max)));
            Relation rel = static_cast<Relation>(rng_.below(3));
            if (t.is_constant()) continue;
            return mk_atom(std::move(t), rel);
        }
    }

    GenParams p_;
    SplitMix64 rng_;
};

} // namespace detail

inline Formula gen_random(const GenParams& p) {
    p.validate();
    detail::Generator g(p);
    return g.node(p.depth);
}

} // namespace qelim
