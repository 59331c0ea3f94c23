#pragma once

#include "qelim/qelim.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qelim {

// Readable values in test failure messages.
inline void PrintTo(const Atom& a, std::ostream* os) { *os << print(a); }
inline void PrintTo(const Formula& f, std::ostream* os) { *os << print(f); }
inline void PrintTo(const LinearTerm& t, std::ostream* os) { *os << print(t); }
inline void PrintTo(const ConstraintSystem& s, std::ostream* os) { *os << print(s.to_formula()); }
inline void PrintTo(const Literal& l, std::ostream* os) { *os << print(l.formula()); }

} // namespace qelim

namespace qtest {

using namespace qelim;

inline Formula F(const std::string& s) { return parse(s); }

inline Atom A(const std::string& s) {
    Formula f = parse(s);
    if (!f.is_atom()) throw std::invalid_argument("not an atom: " + s);
    return f.atom();
}

inline Var V(const std::string& s) { return Var(s); }

// Calls fn on every point of the grid {lo, lo+step, ..., hi}^vars.
inline void for_grid(const std::vector<Var>& vars, const Rational& lo, const Rational& hi, const Rational& step,
                     const std::function<void(const Model&)>& fn) {
    Model m;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == vars.size()) {
            fn(m);
            return;
        }
        for (Rational x = lo; x <= hi; x += step) {
            m[vars[i]] = x;
            rec(i + 1);
        }
    };
    rec(0);
}

inline std::vector<Var> var_list(const VarSet& s) { return {s.begin(), s.end()}; }

// Agreement of two quantifier-free formulas on a rational grid. Returns the
// first disagreeing point if any.
inline std::optional<Model> grid_disagreement(const Formula& a, const Formula& b, const Rational& lo = -4,
                                              const Rational& hi = 4, const Rational& step = Rational(1, 2)) {
    VarSet vs = all_vars(a);
    auto vb = all_vars(b);
    vs.insert(vb.begin(), vb.end());
    std::optional<Model> bad;
    for_grid(var_list(vs), lo, hi, step, [&](const Model& m) {
        if (!bad && eval(a, m) != eval(b, m)) bad = m;
    });
    return bad;
}

// Satisfiability by enumerating all truth assignments of the atoms and
// testing each consistent one with exact simplex feasibility.
inline bool brute_force_sat(const Formula& f) {
    auto ps = atoms(f);
    const std::size_t n = ps.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<Atom> lits;
        std::vector<Formula> eq_negs;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) lits.push_back(ps[i]);
            else if (auto c = ps[i].complement()) lits.push_back(*c);
            else eq_negs.push_back(negate_atom(ps[i]));
        }
        // Negated equalities branch into their two strict sides.
        std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
            if (k == eq_negs.size()) {
                auto r = feasible(lits);
                if (!is_feasible(r)) return false;
                Model m = std::get<Feasible>(r).witness;
                complete_model(m, all_vars(f));
                return eval(f, m);
            }
            for (const auto& side : eq_negs[k].children()) {
                lits.push_back(side.atom());
                bool ok = rec(k + 1);
                lits.pop_back();
                if (ok) return true;
            }
            return false;
        };
        if (rec(0)) return true;
    }
    return false;
}

inline Atom random_atom(SplitMix64& rng, const std::vector<Var>& vars, std::int64_t lo, std::int64_t hi,
                        bool with_eq = true) {
    while (true) {
        LinearTerm t(Rational(rng.between(lo, hi)));
        for (const auto& v : vars)
            if (rng.below(3) != 0) t.add_term(v, Rational(rng.between(lo, hi)));
        if (t.is_constant()) continue;
        auto r = static_cast<Relation>(rng.below(with_eq ? 3 : 2));
        return Atom(t, r);
    }
}

inline ConstraintSystem random_system(SplitMix64& rng, const std::vector<Var>& vars, std::size_t n,
                                      std::int64_t lo = -5, std::int64_t hi = 5) {
    ConstraintSystem s;
    for (std::size_t i = 0; i < n; ++i) s.add(random_atom(rng, vars, lo, hi, rng.below(6) == 0));
    return s;
}

inline std::vector<Var> make_vars(int n) {
    std::vector<Var> out;
    for (int i = 0; i < n; ++i) out.push_back(Var(gen_var_name(i)));
    return out;
}

inline GenParams small_params(std::uint64_t seed, int vars = 3, int depth = 6) {
    GenParams p;
    p.num_vars = vars;
    p.depth = depth;
    p.seed = seed;
    return p;
}

} // namespace qtest
