#pragma once

// Virtual substitution (Loos-Weispfenning) for linear real arithmetic.
//
// exists x. F is replaced by the disjunction of F at finitely many test
// points: -infinity, every exact lower bound e of x (from c*x + r >= 0 or
// c*x + r = 0 with e = -r/c), and e + epsilon for every strict lower bound
// c*x + r > 0 with c > 0. Substitution into an atom c*x + r rel 0, with
// s = c*e + r the plain substitution of e:
//
//   point        rel   c > 0          c < 0          c = 0
//   e            any   s rel 0        s rel 0        unchanged
//   -infinity    >=,>  false          true           unchanged
//   -infinity    =     false          false          unchanged
//   e + epsilon  >=,>  s >= 0         s > 0          unchanged
//   e + epsilon  =     false          false          unchanged
//
// The output is only constant-folded; no other simplification happens.

#include "qelim/budget.hpp"
#include "qelim/formula.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace qelim {

struct TestPoint {
    enum class Kind { MinusInfinity, Exact, ExactPlusEpsilon };
    Kind kind = Kind::MinusInfinity;
    LinearTerm term; // free of the eliminated variable

    friend bool operator==(const TestPoint&, const TestPoint&) = default;
};

// Solved form of c*x + r (c != 0): the term e = -r/c with x = e on the hyperplane.
inline LinearTerm solve_for(const LinearTerm& t, const Var& x) {
    Rational c = t.coeff(x);
    LinearTerm rest = t.substitute(x, LinearTerm());
    return rest * (Rational(-1) / c);
}

inline std::vector<TestPoint> test_points(const Formula& f, const Var& x) {
    std::vector<TestPoint> pts{TestPoint{}};
    auto push = [&](TestPoint p) {
        if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(std::move(p));
    };
    for (const auto& a : atoms(f)) {
        Rational c = a.term().coeff(x);
        if (c == 0) continue;
        LinearTerm e = solve_for(a.term(), x);
        switch (a.rel()) {
        case Relation::EQ: push({TestPoint::Kind::Exact, e}); break;
        case Relation::GE:
            if (c > 0) push({TestPoint::Kind::Exact, e});
            break;
        case Relation::GT:
            if (c > 0) push({TestPoint::Kind::ExactPlusEpsilon, e});
            break;
        }
    }
    return pts;
}

inline Formula substitute_atom(const Atom& a, const Var& x, const TestPoint& p) {
    Rational c = a.term().coeff(x);
    if (c == 0) return mk_atom(a);
    switch (p.kind) {
    case TestPoint::Kind::Exact: return mk_atom(a.term().substitute(x, p.term), a.rel());
    case TestPoint::Kind::MinusInfinity:
        if (a.rel() == Relation::EQ) return mk_false();
        return c < 0 ? mk_true() : mk_false();
    case TestPoint::Kind::ExactPlusEpsilon: {
        if (a.rel() == Relation::EQ) return mk_false();
        LinearTerm s = a.term().substitute(x, p.term);
        return mk_atom(std::move(s), c > 0 ? Relation::GE : Relation::GT);
    }
    }
    return mk_atom(a);
}

// Substitutes the test point into every atom. Under a negation the limit
// truth value of the atom is simply negated.
inline Formula substitute_point(const Formula& f, const Var& x, const TestPoint& p) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Atom: return substitute_atom(f.atom(), x, p);
    case K::Not: return mk_not(substitute_point(f.body(), x, p));
    case K::And:
    case K::Or: {
        std::vector<Formula> cs;
        cs.reserve(f.children().size());
        for (const auto& c : f.children()) {
            Formula s = substitute_point(c, x, p);
            // Short-circuit on the absorbing constant.
            if (f.kind() == K::And && s.is_false()) return s;
            if (f.kind() == K::Or && s.is_true()) return s;
            cs.push_back(std::move(s));
        }
        return f.kind() == K::And ? mk_and(std::move(cs)) : mk_or(std::move(cs));
    }
    case K::Exists:
    case K::Forall: break;
    }
    throw std::invalid_argument("substitute_point: formula has quantifiers");
}

// Formula equivalent to exists x. f, for quantifier-free f in negation normal form.
inline Formula lw_eliminate_var(const Formula& f, const Var& x) {
    if (!is_quantifier_free(f)) throw std::invalid_argument("lw_eliminate_var: formula has quantifiers");
    if (!all_vars(f).count(x)) return f;
    std::vector<Formula> ds;
    std::size_t size = 0;
    for (const auto& p : test_points(f, x)) {
        Budget::poll();
        Formula d = substitute_point(f, x, p);
        if (d.is_true()) return d;
        size += tree_size(d);
        Budget::note_memory(size * kFormulaNodeBytes);
        ds.push_back(std::move(d));
    }
    return mk_or(std::move(ds));
}

// Eliminates the variables of vs, rightmost first.
inline Formula lw_eliminate(const Formula& f, std::span<const Var> vs) {
    Formula cur = nnf(f);
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) cur = lw_eliminate_var(cur, *it);
    return cur;
}

inline Formula lw_eliminate_all(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
    case K::False:
    case K::Atom: return f;
    case K::Not: return mk_not(lw_eliminate_all(f.body()));
    case K::And:
    case K::Or: {
        std::vector<Formula> cs;
        for (const auto& c : f.children()) cs.push_back(lw_eliminate_all(c));
        return f.kind() == K::And ? mk_and(std::move(cs)) : mk_or(std::move(cs));
    }
    case K::Exists: return lw_eliminate(lw_eliminate_all(f.body()), f.bound());
    case K::Forall: return nnf(mk_not(lw_eliminate(mk_not(lw_eliminate_all(f.body())), f.bound())));
    }
    return f;
}

} // namespace qelim
