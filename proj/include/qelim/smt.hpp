#pragma once

// Lazy SMT for quantifier-free linear rational arithmetic. Atoms are
// abstracted to propositional variables and the formula is Tseitin-encoded;
// each full propositional model is checked by the simplex, and an infeasible
// one is refuted by blocking a minimized conflicting subset of its literals.

#include "qelim/formula.hpp"
#include "qelim/polyhedra.hpp"
#include "qelim/sat_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

namespace qelim {

struct TheoryConflict {
    std::vector<Atom> literals;
};

// Deletion filter: drops each literal whose removal keeps the set infeasible.
// The result is an inclusion-minimal infeasible subset, in input order.
inline TheoryConflict minimize_conflict(const TheoryConflict& c) {
    std::vector<Atom> kept = c.literals;
    std::size_t i = 0;
    while (i < kept.size()) {
        std::vector<Atom> trial;
        trial.reserve(kept.size() - 1);
        for (std::size_t k = 0; k < kept.size(); ++k)
            if (k != i) trial.push_back(kept[k]);
        if (!is_feasible(feasible(trial))) kept = std::move(trial);
        else ++i;
    }
    return TheoryConflict{std::move(kept)};
}

// Checks a conjunction of literals; an infeasible one yields the (not yet
// minimized) conflicting subset reported by the simplex.
inline std::variant<Model, TheoryConflict> theory_check(std::span<const Atom> literals) {
    auto r = feasible(literals);
    if (auto* f = std::get_if<Feasible>(&r)) return std::move(f->witness);
    TheoryConflict c;
    for (auto i : std::get<Infeasible>(r).core) c.literals.push_back(literals[i]);
    return c;
}

struct SmtStats {
    std::uint64_t checks = 0;
    std::uint64_t sat_calls = 0;
    std::uint64_t theory_checks = 0;
    std::uint64_t theory_conflicts = 0;
};

class SmtSolver {
public:
    SmtSolver() {
        true_var_ = sat_.new_var();
        sat_.add_clause({sat::Lit::pos(true_var_)});
    }

    // Conjoins a quantifier-free formula to the assertion set.
    void add(const Formula& f) {
        if (!is_quantifier_free(f)) throw std::invalid_argument("SmtSolver::add: formula has quantifiers");
        if (f.kind() == Formula::Kind::And) {
            for (const auto& c : f.children()) add(c);
            return;
        }
        keep_alive_.push_back(f);
        for (const auto& a : atoms(f)) a.term().collect_vars(vars_);
        if (f.kind() == Formula::Kind::Or) {
            std::vector<sat::Lit> clause;
            for (const auto& c : f.children()) clause.push_back(encode(c));
            sat_.add_clause(std::move(clause));
        } else {
            sat_.add_clause({encode(f)});
        }
    }

    // A model of the assertions conjoined with the given atoms, or nullopt
    // when unsatisfiable. Variables of the problem that the theory leaves
    // unconstrained are set to 0.
    std::optional<Model> check(std::span<const Atom> assumptions = {}) {
        ++stats_.checks;
        std::vector<sat::Lit> assume;
        VarSet vars = vars_;
        for (const auto& a : assumptions) {
            if (a.is_ground()) {
                if (a.ground_value()) continue;
                return std::nullopt;
            }
            assume.push_back(atom_lit(a));
            a.term().collect_vars(vars);
        }
        while (true) {
            Budget::poll();
            ++stats_.sat_calls;
            if (sat_.solve(assume) == sat::Result::Unsat) return std::nullopt;
            // Only atoms that justify the assertions under this assignment
            // reach the theory; the others cannot affect satisfaction.
            std::set<int> active;
            for (auto l : assume) justify_atom(l.var(), active);
            std::set<std::pair<const void*, bool>> seen;
            for (const auto& f : keep_alive_) justify(f, true, active, seen);
            std::vector<Atom> lits;
            std::vector<sat::Lit> sat_lits;
            for (int v : active) {
                const Atom& base = base_atoms_.at(v);
                bool val = sat_.model_value(v);
                if (val) {
                    lits.push_back(base);
                    sat_lits.push_back(sat::Lit::pos(v));
                } else if (auto c = base.complement()) {
                    lits.push_back(*c);
                    sat_lits.push_back(sat::Lit::neg(v));
                }
                // A false equality is represented by its true strict side.
            }
            ++stats_.theory_checks;
            auto r = theory_check(lits);
            if (auto* m = std::get_if<Model>(&r)) {
                complete_model(*m, vars);
                return std::move(*m);
            }
            ++stats_.theory_conflicts;
            auto core = minimize_conflict(std::get<TheoryConflict>(r));
            std::vector<sat::Lit> block;
            for (const auto& a : core.literals) {
                auto it = std::find(lits.begin(), lits.end(), a);
                assert(it != lits.end());
                sat::Lit l = sat_lits[it - lits.begin()];
                assert(sat_.value(l) == sat::Value::True);
                block.push_back(~l);
            }
            // The refuted assignment falsifies every literal of the new clause.
            sat_.add_clause(std::move(block));
        }
    }

    const SmtStats& stats() const { return stats_; }

private:
    // Atoms are mapped onto base atoms: inequalities with a positive leading
    // coefficient (t >= 0 and t > 0 with -t > 0 / -t >= 0 as their
    // complements) and equalities.
    std::pair<Atom, bool> base_of(const Atom& a) const {
        if (a.rel() == Relation::EQ || a.term().leading_coeff() > 0) return {a, true};
        return {*a.complement(), false};
    }

    int atom_var(const Atom& a) { return atom_lit(a).var(); }

    sat::Lit atom_lit(const Atom& a) {
        auto [base, positive] = base_of(a);
        auto it = atom_vars_.find(base);
        int v;
        if (it != atom_vars_.end()) {
            v = it->second;
        } else {
            v = sat_.new_var();
            atom_vars_.emplace(base, v);
            base_atoms_.emplace(v, base);
            if (base.rel() == Relation::EQ) {
                // t = 0  or  t > 0  or  -t > 0
                sat::Lit gt = atom_lit(Atom(base.term(), Relation::GT));
                sat::Lit lt = atom_lit(Atom(-base.term(), Relation::GT));
                sat_.add_clause({sat::Lit::pos(v), gt, lt});
                eq_sides_.emplace(v, std::make_pair(gt, lt));
            }
        }
        return positive ? sat::Lit::pos(v) : sat::Lit::neg(v);
    }

    bool is_true(sat::Lit l) const { return sat_.value(l) == sat::Value::True; }

    void justify_atom(int v, std::set<int>& active) const {
        active.insert(v);
        auto it = eq_sides_.find(v);
        if (it != eq_sides_.end() && !sat_.model_value(v))
            active.insert(is_true(it->second.first) ? it->second.first.var() : it->second.second.var());
    }

    // Adds the atoms that make f evaluate to `want` under the current
    // assignment: every child where all are needed, else the first child
    // that already has the wanted value.
    void justify(const Formula& f, bool want, std::set<int>& active,
                 std::set<std::pair<const void*, bool>>& seen) {
        using K = Formula::Kind;
        switch (f.kind()) {
        case K::True:
        case K::False: return;
        case K::Atom: justify_atom(atom_lit(f.atom()).var(), active); return;
        case K::Not: justify(f.body(), !want, active, seen); return;
        case K::And:
        case K::Or: {
            if (!seen.insert({f.id(), want}).second) return;
            const bool all = (f.kind() == K::And) == want;
            for (const auto& c : f.children()) {
                if (all) {
                    justify(c, want, active, seen);
                } else if (is_true(encode(c)) == want) {
                    justify(c, want, active, seen);
                    return;
                }
            }
            return;
        }
        case K::Exists:
        case K::Forall: break;
        }
    }

    sat::Lit encode(const Formula& f) {
        using K = Formula::Kind;
        switch (f.kind()) {
        case K::True: return sat::Lit::pos(true_var_);
        case K::False: return sat::Lit::neg(true_var_);
        case K::Atom: return atom_lit(f.atom());
        case K::Not: return ~encode(f.body());
        case K::And:
        case K::Or: {
            auto it = gates_.find(f.id());
            if (it != gates_.end()) return it->second;
            std::vector<sat::Lit> kids;
            for (const auto& c : f.children()) kids.push_back(encode(c));
            sat::Lit g = sat::Lit::pos(sat_.new_var());
            // And: g <-> /\ kids.  Or is the dual with all literals negated.
            const bool is_and = f.kind() == K::And;
            sat::Lit gg = is_and ? g : ~g;
            std::vector<sat::Lit> big{gg};
            for (sat::Lit k : kids) {
                sat::Lit kk = is_and ? k : ~k;
                sat_.add_clause({~gg, kk});
                big.push_back(~kk);
            }
            sat_.add_clause(std::move(big));
            gates_.emplace(f.id(), g);
            return g;
        }
        case K::Exists:
        case K::Forall: break;
        }
        throw std::invalid_argument("SmtSolver: formula has quantifiers");
    }

    sat::Solver sat_;
    int true_var_ = 0;
    std::map<Atom, int> atom_vars_;
    std::unordered_map<int, Atom> base_atoms_;
    std::map<int, std::pair<sat::Lit, sat::Lit>> eq_sides_;
    VarSet vars_;
    std::unordered_map<const void*, sat::Lit> gates_;
    std::vector<Formula> keep_alive_;
    SmtStats stats_;
};

inline std::optional<Model> check_sat(const Formula& f) {
    SmtSolver s;
    s.add(f);
    auto m = s.check();
    if (m) complete_model(*m, free_vars(f));
    return m;
}

inline bool is_satisfiable(const Formula& f) { return check_sat(f).has_value(); }

// f1 and f2 have the same models: f1 && !f2 and f2 && !f1 are both unsatisfiable.
inline bool equiv_check(const Formula& f1, const Formula& f2) {
    return !is_satisfiable(mk_and({f1, mk_not(f2)})) && !is_satisfiable(mk_and({f2, mk_not(f1)}));
}

// Every model of `a` satisfies `b`.
inline bool implies(const Formula& a, const Formula& b) { return !is_satisfiable(mk_and({a, mk_not(b)})); }

} // namespace qelim
