#pragma once

// Quantifier elimination by model enumeration, generalization and projection.
//
// exist_elim(F, vs) repeatedly asks the SMT solver for a model a of the
// remaining formula H, widens it to the conjunction M1 of the atom truth
// values of F at a (generalize1), drops every conjunct of M1 that is not
// needed to keep M1 inside F (generalize2), projects the result onto the free
// variables and adds that projection to the output DNF O while removing it
// from H. The loop stops when H is unsatisfiable; then O is equivalent to
// (exists vs. F).

#include "qelim/formula.hpp"
#include "qelim/polyhedra.hpp"
#include "qelim/smt.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qelim {

class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Literal {
    Atom atom;
    bool positive = true;

    // The literal as a single constraint. Negated equalities have none.
    Atom constraint() const {
        if (positive) return atom;
        if (auto c = atom.complement()) return *c;
        throw ContractError("negated equality is not a convex constraint");
    }
    Formula formula() const { return positive ? mk_atom(atom) : mk_not(mk_atom(atom)); }

    friend bool operator==(const Literal&, const Literal&) = default;
};

using Conjunction = std::vector<Literal>;

inline Formula to_formula(const Conjunction& m) {
    std::vector<Formula> fs;
    for (const auto& l : m) fs.push_back(l.formula());
    return mk_and(std::move(fs));
}

inline std::vector<Atom> to_constraints(const Conjunction& m) {
    std::vector<Atom> out;
    out.reserve(m.size());
    for (const auto& l : m) out.push_back(l.constraint());
    return out;
}

// Disjunction of conjunctions of constraints. No disjuncts means false; a
// disjunct without constraints means true.
class DnfFormula {
public:
    DnfFormula() = default;
    explicit DnfFormula(std::vector<ConstraintSystem> ds) : disjuncts_(std::move(ds)) {}

    std::span<const ConstraintSystem> disjuncts() const { return disjuncts_; }
    std::size_t size() const { return disjuncts_.size(); }
    bool is_false() const { return disjuncts_.empty(); }
    bool is_true() const {
        return std::any_of(disjuncts_.begin(), disjuncts_.end(), [](const auto& d) { return d.empty(); });
    }

    void add(ConstraintSystem d) { disjuncts_.push_back(std::move(d)); }

    std::size_t atom_count() const {
        std::size_t n = 0;
        for (const auto& d : disjuncts_) n += d.size();
        return n;
    }

    Formula to_formula() const {
        std::vector<Formula> fs;
        for (const auto& d : disjuncts_) fs.push_back(d.to_formula());
        return mk_or(std::move(fs));
    }

private:
    std::vector<ConstraintSystem> disjuncts_;
};

enum class Algorithm { Main, Mod1, Mod2 };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::Main: return "main";
    case Algorithm::Mod1: return "mod1";
    case Algorithm::Mod2: return "mod2";
    }
    return "?";
}

struct ElimOptions {
    Algorithm algorithm = Algorithm::Main;
    // Feed generalize2 the conjuncts in reverse atom order.
    bool reverse_generalize_order = false;
    // Check the loop invariants with extra SMT calls at every iteration.
    bool verify_invariants = false;
    // Background assumption T on the free variables (elimination modulo T).
    std::optional<Formula> assumption;
};

struct ElimStats {
    std::uint64_t eliminations = 0;
    std::uint64_t iterations = 0;
    std::uint64_t smt_calls = 0;
    std::uint64_t generalize2_relaxations = 0;
    std::uint64_t projection_count = 0;
    // Largest atom count N_F among the eliminated bodies.
    std::size_t max_atom_count = 0;
    // Eliminations whose iteration count exceeded 2^N_F.
    std::uint64_t bound_violations = 0;
    double smt_ms = 0;
    double generalize_ms = 0;
    double project_ms = 0;
    double total_ms = 0;
    std::vector<std::string> violations;

    ElimStats& operator+=(const ElimStats& o) {
        eliminations += o.eliminations;
        iterations += o.iterations;
        smt_calls += o.smt_calls;
        generalize2_relaxations += o.generalize2_relaxations;
        projection_count += o.projection_count;
        max_atom_count = std::max(max_atom_count, o.max_atom_count);
        bound_violations += o.bound_violations;
        smt_ms += o.smt_ms;
        generalize_ms += o.generalize_ms;
        project_ms += o.project_ms;
        total_ms += o.total_ms;
        violations.insert(violations.end(), o.violations.begin(), o.violations.end());
        return *this;
    }
};

struct ElimResult {
    DnfFormula output;
    ElimStats stats;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline Conjunction generalize1_with(std::span<const Atom> atoms_of_f, const Model& a) {
    Conjunction m;
    m.reserve(atoms_of_f.size());
    for (const auto& p : atoms_of_f) {
        if (p.holds(a)) {
            m.push_back({p, true});
        } else if (p.rel() != Relation::EQ) {
            m.push_back({p, false});
        } else {
            // a lies strictly on one side of the hyperplane; keep that side so
            // the conjunction stays convex.
            Rational v = p.term().evaluate(a);
            m.push_back({Atom(v > 0 ? p.term() : -p.term(), Relation::GT), true});
        }
    }
    return m;
}

// Deletion filter against the assertions of `g`: conjunct i is dropped when
// g && (m without i) stays unsatisfiable.
inline Conjunction relax(SmtSolver& g, Conjunction m, std::uint64_t& relaxations) {
    std::size_t i = 0;
    while (i < m.size()) {
        std::vector<Atom> trial;
        trial.reserve(m.size());
        for (std::size_t k = 0; k < m.size(); ++k)
            if (k != i) trial.push_back(m[k].constraint());
        if (!g.check(trial)) {
            m.erase(m.begin() + static_cast<std::ptrdiff_t>(i));
            ++relaxations;
        } else {
            ++i;
        }
    }
    return m;
}

inline Formula negation_of(std::span<const Atom> conj) {
    std::vector<Formula> fs;
    fs.reserve(conj.size());
    for (const auto& a : conj) fs.push_back(negate_atom(a));
    return mk_or(std::move(fs));
}

// Sample points of a polyhedron: its simplex witness plus witnesses pushed
// towards +-box along each variable.
inline std::vector<Model> sample_points(const ConstraintSystem& s, const VarSet& vars) {
    std::vector<Model> out;
    auto push = [&](std::vector<Atom> cs) {
        auto r = feasible(cs);
        if (auto* f = std::get_if<Feasible>(&r)) {
            Model m = f->witness;
            complete_model(m, vars);
            out.push_back(std::move(m));
        }
    };
    std::vector<Atom> base(s.constraints().begin(), s.constraints().end());
    push(base);
    for (const auto& v : vars) {
        for (int k : {-7, 7}) {
            auto cs = base;
            LinearTerm t = LinearTerm::variable(v) - LinearTerm(Rational(k));
            cs.emplace_back(k > 0 ? t : -t, Relation::GE);
            push(std::move(cs));
        }
    }
    return out;
}

// Sampling check of pi == exists vs. m: projections of points of m satisfy
// pi, and every sampled point of pi extends to a point of m.
inline bool projection_matches(const ConstraintSystem& m, const ConstraintSystem& pi, std::span<const Var> vs,
                               const VarSet& retained) {
    VarSet all = m.variables();
    all.insert(retained.begin(), retained.end());
    for (const auto& p : sample_points(m, all))
        if (!pi.satisfied_by(p)) return false;
    for (const auto& p : sample_points(pi, retained)) {
        std::vector<Atom> cs(m.constraints().begin(), m.constraints().end());
        for (const auto& [v, q] : p) {
            if (std::find(vs.begin(), vs.end(), v) != vs.end()) continue;
            cs.emplace_back(LinearTerm::variable(v) - LinearTerm(q), Relation::EQ);
        }
        if (!is_feasible(feasible(cs))) return false;
    }
    return true;
}

struct LoopState {
    Formula f;
    Formula theory;
    Formula g;
    std::vector<Formula> h_blockers;
    std::vector<Formula> g_blockers;
};

inline void verify_loop_head(const LoopState& st, const DnfFormula& out, std::span<const Var> vs, Algorithm alg,
                             std::uint64_t iter, std::vector<std::string>& violations) {
    auto fail = [&](const std::string& what) {
        violations.push_back("iteration " + std::to_string(iter) + ": " + what);
    };
    Formula o = out.to_formula();
    std::vector<Formula> hs{st.f, st.theory};
    hs.insert(hs.end(), st.h_blockers.begin(), st.h_blockers.end());
    Formula h = mk_and(hs);
    if (alg != Algorithm::Mod1 && is_satisfiable(mk_and({h, o}))) fail("H && O is satisfiable");
    if (mentions_any(o, vs)) fail("O mentions an eliminated variable");
    if (is_satisfiable(mk_and({st.f, st.theory, mk_not(o), mk_not(h)}))) fail("F does not imply O || H");
    if (is_satisfiable(mk_and({mk_or({o, h}), st.theory, mk_not(o), mk_not(st.f)})))
        fail("O || H does not imply O || F");
    if (alg == Algorithm::Mod2) {
        std::vector<Formula> gs{st.g, st.theory};
        gs.insert(gs.end(), st.g_blockers.begin(), st.g_blockers.end());
        Formula expected = mk_and({mk_not(mk_or({st.f, o})), st.theory});
        if (!equiv_check(mk_and(gs), expected)) fail("G is not equivalent to !(F || O)");
    }
}

inline void verify_iteration(const LoopState& st, const Model& a, const Conjunction& m1, const Conjunction& m2,
                             const ConstraintSystem& pi, std::span<const Var> vs, const VarSet& retained,
                             std::uint64_t iter, std::vector<std::string>& violations) {
    auto fail = [&](const std::string& what) {
        violations.push_back("iteration " + std::to_string(iter) + ": " + what);
    };
    if (!eval(to_formula(m1), a)) fail("model does not satisfy M1");
    if (is_satisfiable(mk_and({to_formula(m1), st.theory, mk_not(st.f)}))) fail("M1 does not imply F");
    std::vector<Formula> gs{st.g, st.theory};
    gs.insert(gs.end(), st.g_blockers.begin(), st.g_blockers.end());
    Formula g = mk_and(gs);
    if (is_satisfiable(mk_and({g, to_formula(m2)}))) fail("G && M2 is satisfiable");
    for (std::size_t i = 0; i < m2.size(); ++i) {
        Conjunction rest = m2;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        if (!is_satisfiable(mk_and({g, to_formula(rest)}))) fail("M2 is not inclusion-minimal");
    }
    if (pi.mentions_any_of(vs)) fail("projection mentions an eliminated variable");
    if (!projection_matches(ConstraintSystem(to_constraints(m2)), pi, vs, retained))
        fail("projection differs from exists vs. M2 on sampled points");
}

} // namespace detail

// The conjunction of the atoms of f that hold at a and the negations of
// those that do not, in order of first occurrence in f. A false equality is
// replaced by the strict inequality that a satisfies.
inline Conjunction generalize1(const Formula& f, const Model& a) {
    if (!is_quantifier_free(f)) throw ContractError("generalize1: formula has quantifiers");
    if (!eval(f, a)) throw ContractError("generalize1: the assignment is not a model of the formula");
    auto ps = atoms(f);
    return detail::generalize1_with(ps, a);
}

// Removes conjuncts from m, in list order, as long as g && m stays
// unsatisfiable. Requires g && m unsatisfiable.
inline Conjunction generalize2(const Formula& g, const Conjunction& m) {
    SmtSolver s;
    s.add(g);
    if (s.check(to_constraints(m))) throw ContractError("generalize2: g && m is satisfiable");
    std::uint64_t relaxations = 0;
    return detail::relax(s, m, relaxations);
}

namespace detail {

inline ElimResult exist_elim_impl(const Formula& input, std::span<const Var> vs, const ElimOptions& opt) {
    if (!is_quantifier_free(input)) throw ContractError("exist_elim: formula has quantifiers");
    Stopwatch total;
    ElimResult res;
    ElimStats& st = res.stats;
    st.eliminations = 1;

    LoopState ls;
    ls.f = nnf(input);
    ls.theory = opt.assumption ? nnf(*opt.assumption) : mk_true();
    ls.g = nnf(mk_not(ls.f));
    if (!is_quantifier_free(ls.theory)) throw ContractError("exist_elim: assumption has quantifiers");

    const std::vector<Atom> atoms_f = atoms(ls.f);
    st.max_atom_count = atoms_f.size();
    // Projection eliminates the rightmost variable first.
    const std::vector<Var> order(vs.rbegin(), vs.rend());
    VarSet vars = all_vars(ls.f);
    for (const auto& v : all_vars(ls.theory)) vars.insert(v);
    VarSet retained;
    for (const auto& v : vars)
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) retained.insert(v);

    SmtSolver h;
    h.add(ls.f);
    h.add(ls.theory);
    SmtSolver g;
    g.add(ls.g);
    g.add(ls.theory);

    std::size_t out_atoms = 0;
    while (true) {
        Budget::poll();
        if (opt.verify_invariants)
            verify_loop_head(ls, res.output, vs, opt.algorithm, st.iterations, st.violations);
        std::optional<Model> a;
        {
            Stopwatch sw;
            a = h.check();
            st.smt_ms += sw.ms();
        }
        if (!a) break;
        ++st.iterations;
        complete_model(*a, vars);

        Conjunction m1, m2;
        {
            Stopwatch sw;
            m1 = generalize1_with(atoms_f, *a);
            if (opt.reverse_generalize_order) std::reverse(m1.begin(), m1.end());
            m2 = relax(g, m1, st.generalize2_relaxations);
            st.generalize_ms += sw.ms();
        }
        ConstraintSystem m2_sys(to_constraints(m2));
        ConstraintSystem pi;
        {
            Stopwatch sw;
            pi = project(m2_sys, order);
            ++st.projection_count;
            st.project_ms += sw.ms();
        }
        if (opt.verify_invariants)
            verify_iteration(ls, *a, m1, m2, pi, vs, retained, st.iterations, st.violations);

        if (pi.is_trivially_false()) {
            // Cannot happen: a satisfies M2, so its projection is nonempty.
            st.violations.push_back("iteration " + std::to_string(st.iterations) + ": empty projection");
            break;
        }
        if (pi.empty()) {
            res.output = DnfFormula({ConstraintSystem{}});
            break;
        }
        out_atoms += pi.size();
        Budget::note_memory(out_atoms * kAtomBytes);
        res.output.add(pi);

        Formula not_pi = negation_of(pi.constraints());
        Formula blocker = opt.algorithm == Algorithm::Mod1 ? negation_of(m2_sys.constraints()) : not_pi;
        h.add(blocker);
        ls.h_blockers.push_back(blocker);
        if (opt.algorithm == Algorithm::Mod2) {
            g.add(not_pi);
            ls.g_blockers.push_back(not_pi);
        }
    }
    if (atoms_f.size() < 63 && st.iterations > (std::uint64_t{1} << atoms_f.size())) {
        ++st.bound_violations;
        st.violations.push_back("iteration count exceeds 2^N_F");
    }
    st.smt_calls = h.stats().checks + g.stats().checks;
    st.total_ms = total.ms();
    return res;
}

} // namespace detail

// DNF equivalent to (exists vs. f), f quantifier-free.
inline ElimResult exist_elim(const Formula& f, std::span<const Var> vs, ElimOptions opt = {}) {
    opt.algorithm = Algorithm::Main;
    opt.assumption.reset();
    return detail::exist_elim_impl(f, vs, opt);
}

// ALL-SAT then project: blocks the generalized model instead of its projection.
inline ElimResult exist_elim_mod1(const Formula& f, std::span<const Var> vs, ElimOptions opt = {}) {
    opt.algorithm = Algorithm::Mod1;
    opt.assumption.reset();
    return detail::exist_elim_impl(f, vs, opt);
}

// Also conjoins each blocked projection to the formula generalize2 checks against.
inline ElimResult exist_elim_mod2(const Formula& f, std::span<const Var> vs, ElimOptions opt = {}) {
    opt.algorithm = Algorithm::Mod2;
    opt.assumption.reset();
    return detail::exist_elim_impl(f, vs, opt);
}

// Result O with O && t equivalent to (exists vs. f) && t.
inline ElimResult exist_elim_modulo(const Formula& f, std::span<const Var> vs, const Formula& t,
                                    ElimOptions opt = {}) {
    if (!is_satisfiable(nnf(t))) return {};
    opt.assumption = t;
    return detail::exist_elim_impl(f, vs, opt);
}

inline ElimResult exist_elim(const Formula& f, std::initializer_list<Var> vs, ElimOptions opt = {}) {
    return exist_elim(f, std::span<const Var>(vs.begin(), vs.size()), std::move(opt));
}

struct QeOutput {
    Formula formula;
    ElimStats stats;
};

namespace detail {

inline Formula eliminate_rec(const Formula& f, const ElimOptions& opt, bool top, ElimStats& stats) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
    case K::False:
    case K::Atom: return f;
    case K::Not: return mk_not(eliminate_rec(f.body(), opt, top, stats));
    case K::And:
    case K::Or: {
        std::vector<Formula> cs;
        for (const auto& c : f.children()) cs.push_back(eliminate_rec(c, opt, top, stats));
        return f.kind() == K::And ? mk_and(std::move(cs)) : mk_or(std::move(cs));
    }
    case K::Exists:
    case K::Forall: {
        Formula body = eliminate_rec(f.body(), opt, false, stats);
        const bool universal = f.kind() == K::Forall;
        Formula target = universal ? nnf(mk_not(body)) : body;
        ElimOptions local = opt;
        // The assumption constrains free variables only; it is usable for
        // outermost quantifiers that do not rebind its variables.
        if (!top || (opt.assumption && mentions_any(*opt.assumption, f.bound()))) local.assumption.reset();
        ElimResult r = local.assumption && !is_satisfiable(nnf(*local.assumption))
                           ? ElimResult{}
                           : exist_elim_impl(target, f.bound(), local);
        stats += r.stats;
        Formula out = r.output.to_formula();
        return universal ? nnf(mk_not(out)) : out;
    }
    }
    return f;
}

} // namespace detail

// Quantifier-free formula equivalent to f (modulo opt.assumption if set),
// eliminating innermost quantifiers first; forall vs. g is handled as
// not exists vs. not g.
inline QeOutput eliminate_all(const Formula& f, const ElimOptions& opt = {}) {
    QeOutput out;
    out.formula = detail::eliminate_rec(f, opt, true, out.stats);
    return out;
}

} // namespace qelim
