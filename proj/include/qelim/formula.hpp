#pragma once

#include "qelim/term.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qelim {

// Immutable formula tree with shared subtrees. Every Formula is built through
// the factory functions below, which keep it normalized: And/Or are flattened
// and have at least two children, constants are folded, ground atoms become
// true/false, and double negations cancel.
class Formula {
public:
    enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };

    Formula() : Formula(make_true()) {}

    Kind kind() const { return node_->kind; }
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

    const Atom& atom() const { return *node_->atom; }
    std::span<const Formula> children() const { return node_->children; }
    // Single child of Not / Exists / Forall.
    const Formula& body() const { return node_->children.front(); }
    const std::vector<Var>& bound() const { return node_->bound; }

    // Identity of the shared node; equal ids imply structural equality.
    const void* id() const { return node_.get(); }

    static Formula make_true() {
        static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, {}, {}}));
        return t;
    }
    static Formula make_false() {
        static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, {}, {}}));
        return f;
    }
    static Formula make_atom(Atom a) {
        if (a.is_ground()) return a.ground_value() ? make_true() : make_false();
        return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(a), {}, {}}));
    }
    static Formula make_not(Formula f) {
        switch (f.kind()) {
        case Kind::True: return make_false();
        case Kind::False: return make_true();
        case Kind::Not: return f.body();
        default: break;
        }
        return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(f)}, {}}));
    }
    static Formula make_and(std::vector<Formula> fs) { return make_nary(Kind::And, std::move(fs)); }
    static Formula make_or(std::vector<Formula> fs) { return make_nary(Kind::Or, std::move(fs)); }
    static Formula make_exists(std::vector<Var> vs, Formula body) {
        return make_quantifier(Kind::Exists, std::move(vs), std::move(body));
    }
    static Formula make_forall(std::vector<Var> vs, Formula body) {
        return make_quantifier(Kind::Forall, std::move(vs), std::move(body));
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        const Node& x = *a.node_;
        const Node& y = *b.node_;
        return x.kind == y.kind && x.atom == y.atom && x.bound == y.bound && x.children == y.children;
    }

private:
    struct Node {
        Kind kind;
        std::optional<Atom> atom;
        std::vector<Formula> children;
        std::vector<Var> bound;
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Formula make_nary(Kind k, std::vector<Formula> fs) {
        const Kind absorbing = k == Kind::And ? Kind::False : Kind::True;
        const Kind neutral = k == Kind::And ? Kind::True : Kind::False;
        std::vector<Formula> flat;
        flat.reserve(fs.size());
        for (auto& f : fs) {
            if (f.kind() == absorbing) return f;
            if (f.kind() == neutral) continue;
            if (f.kind() == k) {
                for (const auto& g : f.children()) flat.push_back(g);
            } else {
                flat.push_back(std::move(f));
            }
        }
        if (flat.empty()) return k == Kind::And ? make_true() : make_false();
        if (flat.size() == 1) return std::move(flat.front());
        return Formula(std::make_shared<const Node>(Node{k, {}, std::move(flat), {}}));
    }

    static Formula make_quantifier(Kind k, std::vector<Var> vs, Formula body) {
        if (vs.empty() || body.is_true() || body.is_false()) return body;
        return Formula(std::make_shared<const Node>(Node{k, {}, {std::move(body)}, std::move(vs)}));
    }

    std::shared_ptr<const Node> node_;
};

inline Formula mk_true() { return Formula::make_true(); }
inline Formula mk_false() { return Formula::make_false(); }
inline Formula mk_atom(Atom a) { return Formula::make_atom(std::move(a)); }
inline Formula mk_atom(LinearTerm t, Relation r) { return Formula::make_atom(Atom(std::move(t), r)); }
inline Formula mk_not(Formula f) { return Formula::make_not(std::move(f)); }
inline Formula mk_and(std::vector<Formula> fs) { return Formula::make_and(std::move(fs)); }
inline Formula mk_or(std::vector<Formula> fs) { return Formula::make_or(std::move(fs)); }
inline Formula mk_implies(Formula a, Formula b) { return mk_or({mk_not(std::move(a)), std::move(b)}); }
inline Formula mk_exists(std::vector<Var> vs, Formula body) {
    return Formula::make_exists(std::move(vs), std::move(body));
}
inline Formula mk_forall(std::vector<Var> vs, Formula body) {
    return Formula::make_forall(std::move(vs), std::move(body));
}

inline Formula mk_conjunction(std::span<const Atom> atoms) {
    std::vector<Formula> fs;
    fs.reserve(atoms.size());
    for (const auto& a : atoms) fs.push_back(mk_atom(a));
    return mk_and(std::move(fs));
}

// Rebuilds f bottom-up through the normalizing constructors.
inline Formula normalize(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Atom: return mk_atom(f.atom());
    case K::Not: return mk_not(normalize(f.body()));
    case K::And:
    case K::Or: {
        std::vector<Formula> cs;
        for (const auto& c : f.children()) cs.push_back(normalize(c));
        return f.kind() == K::And ? mk_and(std::move(cs)) : mk_or(std::move(cs));
    }
    case K::Exists: return mk_exists(f.bound(), normalize(f.body()));
    case K::Forall: return mk_forall(f.bound(), normalize(f.body()));
    }
    return f;
}

inline bool is_quantifier_free(const Formula& f) {
    if (f.is_quantifier()) return false;
    for (const auto& c : f.children())
        if (!is_quantifier_free(c)) return false;
    return true;
}

// Negation of a single atom as a quantifier-free formula without Not:
// the complement of an equality is the disjunction of the two strict sides.
inline Formula negate_atom(const Atom& a) {
    if (auto c = a.complement()) return mk_atom(*c);
    return mk_or({mk_atom(a.term(), Relation::GT), mk_atom(-a.term(), Relation::GT)});
}

namespace detail {

inline Formula nnf_impl(const Formula& f, bool negate) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: return negate ? mk_false() : mk_true();
    case K::False: return negate ? mk_true() : mk_false();
    case K::Atom: return negate ? negate_atom(f.atom()) : f;
    case K::Not: return nnf_impl(f.body(), !negate);
    case K::And:
    case K::Or: {
        std::vector<Formula> cs;
        cs.reserve(f.children().size());
        for (const auto& c : f.children()) cs.push_back(nnf_impl(c, negate));
        bool conj = (f.kind() == K::And) != negate;
        return conj ? mk_and(std::move(cs)) : mk_or(std::move(cs));
    }
    case K::Exists: {
        auto e = mk_exists(f.bound(), nnf_impl(f.body(), false));
        return negate ? mk_not(std::move(e)) : e;
    }
    case K::Forall: {
        // forall vs. g == not exists vs. not g
        auto e = mk_exists(f.bound(), nnf_impl(f.body(), true));
        return negate ? e : mk_not(std::move(e));
    }
    }
    return f;
}

} // namespace detail

// Negation normal form. Negations of atoms are absorbed into the atoms
// (equalities split into two strict inequalities); universal quantifiers
// become negated existentials, so Not only survives directly above Exists.
inline Formula nnf(const Formula& f) { return detail::nnf_impl(f, false); }

inline bool eval(const Formula& f, const Model& m) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return f.atom().holds(m);
    case K::Not: return !eval(f.body(), m);
    case K::And:
        for (const auto& c : f.children())
            if (!eval(c, m)) return false;
        return true;
    case K::Or:
        for (const auto& c : f.children())
            if (eval(c, m)) return true;
        return false;
    case K::Exists:
    case K::Forall: throw std::invalid_argument("eval: formula has quantifiers");
    }
    return false;
}

namespace detail {

inline void collect_atoms(const Formula& f, std::vector<Atom>& out, std::set<Atom>& seen) {
    if (f.is_atom()) {
        if (seen.insert(f.atom()).second) out.push_back(f.atom());
        return;
    }
    for (const auto& c : f.children()) collect_atoms(c, out, seen);
}

inline void collect_free_vars(const Formula& f, VarSet& bound, VarSet& out) {
    if (f.is_atom()) {
        for (const auto& [v, c] : f.atom().term().coeffs())
            if (!bound.count(v)) out.insert(v);
        return;
    }
    if (f.is_quantifier()) {
        std::vector<Var> added;
        for (const auto& v : f.bound())
            if (bound.insert(v).second) added.push_back(v);
        collect_free_vars(f.body(), bound, out);
        for (const auto& v : added) bound.erase(v);
        return;
    }
    for (const auto& c : f.children()) collect_free_vars(c, bound, out);
}

} // namespace detail

// Distinct atoms in order of first occurrence (left to right).
inline std::vector<Atom> atoms(const Formula& f) {
    std::vector<Atom> out;
    std::set<Atom> seen;
    detail::collect_atoms(f, out, seen);
    return out;
}

inline VarSet free_vars(const Formula& f) {
    VarSet bound, out;
    detail::collect_free_vars(f, bound, out);
    return out;
}

// Every variable occurring in an atom, bound or free.
inline VarSet all_vars(const Formula& f) {
    VarSet out;
    for (const auto& a : atoms(f)) a.term().collect_vars(out);
    return out;
}

inline bool mentions_any(const Formula& f, std::span<const Var> vs) {
    VarSet fv = all_vars(f);
    for (const auto& v : vs)
        if (fv.count(v)) return true;
    return false;
}

// Number of nodes in the tree (shared subtrees counted once per occurrence).
inline std::size_t tree_size(const Formula& f) {
    std::size_t n = 1;
    for (const auto& c : f.children()) n += tree_size(c);
    return n;
}

// Extends m with zero for every variable of `vars` it does not assign.
inline void complete_model(Model& m, const VarSet& vars) {
    for (const auto& v : vars) m.try_emplace(v, Rational(0));
}

} // namespace qelim
