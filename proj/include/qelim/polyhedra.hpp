#pragma once

#include "qelim/formula.hpp"
#include "qelim/simplex.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace qelim {

// A conjunction of linear constraints, i.e. a convex polyhedron in Q^n
// (possibly with open faces). Constraints are canonical atoms kept in
// insertion order without duplicates. Ground-true constraints are dropped; a
// ground-false one collapses the system to the single marker `-1 >= 0`.
class ConstraintSystem {
public:
    ConstraintSystem() = default;
    explicit ConstraintSystem(std::span<const Atom> atoms) {
        for (const auto& a : atoms) add(a);
    }
    ConstraintSystem(std::initializer_list<Atom> atoms) {
        for (const auto& a : atoms) add(a);
    }

    static ConstraintSystem infeasible() {
        ConstraintSystem s;
        s.add(Atom::ground_false());
        return s;
    }

    void add(const Atom& a) {
        if (is_trivially_false()) return;
        if (a.is_ground()) {
            if (a.ground_value()) return;
            constraints_.assign(1, a);
            return;
        }
        if (std::find(constraints_.begin(), constraints_.end(), a) == constraints_.end())
            constraints_.push_back(a);
    }

    std::span<const Atom> constraints() const { return constraints_; }
    const Atom& operator[](std::size_t i) const { return constraints_[i]; }
    std::size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    bool is_trivially_false() const {
        return constraints_.size() == 1 && constraints_.front().is_ground();
    }

    VarSet variables() const {
        VarSet out;
        for (const auto& a : constraints_) a.term().collect_vars(out);
        return out;
    }

    bool mentions(const Var& v) const {
        return std::any_of(constraints_.begin(), constraints_.end(), [&](const Atom& a) { return a.mentions(v); });
    }

    bool mentions_any_of(std::span<const Var> vs) const {
        return std::any_of(vs.begin(), vs.end(), [&](const Var& v) { return mentions(v); });
    }

    bool satisfied_by(const Model& m) const {
        return std::all_of(constraints_.begin(), constraints_.end(), [&](const Atom& a) { return a.holds(m); });
    }

    ConstraintSystem without(std::size_t i) const {
        ConstraintSystem s;
        for (std::size_t k = 0; k < constraints_.size(); ++k)
            if (k != i) s.constraints_.push_back(constraints_[k]);
        return s;
    }

    Formula to_formula() const { return mk_conjunction(constraints_); }

    friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;

private:
    std::vector<Atom> constraints_;
};

inline FeasibilityResult feasible(const ConstraintSystem& s) { return feasible(s.constraints()); }

inline bool is_feasible(const ConstraintSystem& s) { return is_feasible(feasible(s)); }

// True iff every solution of `s` satisfies `a`, i.e. s && !a is infeasible.
inline bool implies(const ConstraintSystem& s, const Atom& a) {
    std::vector<Atom> cs(s.constraints().begin(), s.constraints().end());
    if (auto c = a.complement()) {
        cs.push_back(*c);
        return !is_feasible(feasible(cs));
    }
    // !(t = 0) splits into t > 0 and -t > 0.
    for (const auto& side : {Atom(a.term(), Relation::GT), Atom(-a.term(), Relation::GT)}) {
        cs.push_back(side);
        if (is_feasible(feasible(cs))) return false;
        cs.pop_back();
    }
    return true;
}

inline bool is_redundant(const ConstraintSystem& s, std::size_t i) {
    if (i >= s.size()) throw std::out_of_range("is_redundant: constraint index out of range");
    return implies(s.without(i), s[i]);
}

// Greedy scan in input order: drops each constraint implied by the ones still
// kept. The result has the same solution set and no redundant constraint.
inline ConstraintSystem remove_redundant(const ConstraintSystem& s) {
    if (s.is_trivially_false()) return s;
    if (!is_feasible(s)) return ConstraintSystem::infeasible();
    ConstraintSystem kept = s;
    std::size_t i = 0;
    while (i < kept.size()) {
        Budget::poll();
        if (is_redundant(kept, i)) kept = kept.without(i);
        else ++i;
    }
    return kept;
}

inline std::size_t max_coefficient_bits(const ConstraintSystem& s) {
    std::size_t bits = 0;
    for (const auto& a : s.constraints()) bits = std::max(bits, coefficient_bits(a));
    return bits;
}

namespace detail {

// p * pos + q * neg with p, q > 0 chosen so that v cancels; both terms are
// canonical integer forms, so coefficients of the result stay within 2s+1 bits.
inline LinearTerm cancel(const LinearTerm& pos, const LinearTerm& neg, const Var& v) {
    Integer a = pos.coeff(v).get_num();  // > 0
    Integer b = -neg.coeff(v).get_num(); // > 0
    Integer g = gcd(a, b);
    return pos * Rational(b / g) + neg * Rational(a / g);
}

} // namespace detail

// Fourier-Motzkin elimination of one variable. An equality mentioning v is
// used first to substitute v away; otherwise every lower bound on v is paired
// with every upper bound. Constraints not mentioning v are kept verbatim.
inline ConstraintSystem fm_eliminate(const ConstraintSystem& s, const Var& v) {
    if (s.is_trivially_false() || !s.mentions(v)) return s;
    auto cs = s.constraints();
    auto eq = std::find_if(cs.begin(), cs.end(),
                           [&](const Atom& a) { return a.rel() == Relation::EQ && a.mentions(v); });
    ConstraintSystem out;
    if (eq != cs.end()) {
        const LinearTerm& e = eq->term();
        Integer a = e.coeff(v).get_num();
        Rational abs_a(abs(a));
        Rational sgn_a(sgn(a));
        for (auto it = cs.begin(); it != cs.end(); ++it) {
            if (it == eq) continue;
            if (!it->mentions(v)) {
                out.add(*it);
                continue;
            }
            // |a| t - sign(a) c e has no v and preserves the relation.
            Rational c = it->term().coeff(v);
            out.add(Atom(it->term() * abs_a - e * (sgn_a * c), it->rel()));
        }
        return out;
    }
    std::vector<const Atom*> lower, upper;
    for (const auto& a : cs) {
        Rational c = a.term().coeff(v);
        if (c == 0) out.add(a);
        else if (c > 0) lower.push_back(&a);
        else upper.push_back(&a);
    }
    for (const Atom* lo : lower) {
        for (const Atom* up : upper) {
            Relation rel = (lo->rel() == Relation::GT || up->rel() == Relation::GT) ? Relation::GT : Relation::GE;
            out.add(Atom(detail::cancel(lo->term(), up->term(), v), rel));
        }
    }
    return out;
}

// Conjunction equivalent to (exists vs. s): variables are eliminated in the
// given order, each elimination followed by a redundancy pass.
inline ConstraintSystem project(const ConstraintSystem& s, std::span<const Var> vs) {
    if (vs.empty()) return remove_redundant(s);
    ConstraintSystem cur = s;
    for (const auto& v : vs) {
        Budget::poll();
        cur = remove_redundant(fm_eliminate(cur, v));
    }
    return cur;
}

inline ConstraintSystem project(const ConstraintSystem& s, std::initializer_list<Var> vs) {
    return project(s, std::span<const Var>(vs.begin(), vs.size()));
}

} // namespace qelim
