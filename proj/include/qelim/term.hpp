#pragma once

#include "qelim/rational.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qelim {

class Var {
public:
    Var() = default;
    explicit Var(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    friend bool operator==(const Var&, const Var&) = default;
    friend auto operator<=>(const Var& a, const Var& b) { return a.name_ <=> b.name_; }

private:
    std::string name_;
};

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '\''; };
    if (!head(s.front())) return false;
    for (char c : s.substr(1))
        if (!tail(c)) return false;
    return true;
}

using VarSet = std::set<Var>;

// Assignment of rationals to variables.
using Model = std::map<Var, Rational>;

class UnboundVariable : public std::runtime_error {
public:
    explicit UnboundVariable(const Var& v)
        : std::runtime_error("unbound variable: " + v.name()), var_(v) {}
    const Var& var() const { return var_; }

private:
    Var var_;
};

inline std::strong_ordering compare(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// c + sum_v c_v * v, stored sparsely: zero coefficients never appear in the map.
class LinearTerm {
public:
    using Coeffs = std::map<Var, Rational>;

    LinearTerm() = default;
    explicit LinearTerm(Rational constant) : constant_(std::move(constant)) {}
    LinearTerm(Rational constant, Coeffs coeffs) : constant_(std::move(constant)) {
        for (auto& [v, c] : coeffs)
            if (c != 0) coeffs_.emplace(v, std::move(c));
    }

    static LinearTerm variable(const Var& v, const Rational& coeff = 1) {
        LinearTerm t;
        if (coeff != 0) t.coeffs_.emplace(v, coeff);
        return t;
    }

    const Rational& constant() const { return constant_; }
    const Coeffs& coeffs() const { return coeffs_; }
    bool is_constant() const { return coeffs_.empty(); }
    bool mentions(const Var& v) const { return coeffs_.count(v) != 0; }

    Rational coeff(const Var& v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    // Leading (lexicographically first) variable's coefficient; requires !is_constant().
    const Rational& leading_coeff() const { return coeffs_.begin()->second; }

    void add_term(const Var& v, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = coeffs_.try_emplace(v, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) coeffs_.erase(it);
        }
    }

    LinearTerm& operator+=(const LinearTerm& o) {
        constant_ += o.constant_;
        for (const auto& [v, c] : o.coeffs_) add_term(v, c);
        return *this;
    }
    LinearTerm& operator-=(const LinearTerm& o) {
        constant_ -= o.constant_;
        for (const auto& [v, c] : o.coeffs_) add_term(v, -c);
        return *this;
    }
    LinearTerm& operator*=(const Rational& k) {
        if (k == 0) {
            constant_ = 0;
            coeffs_.clear();
            return *this;
        }
        constant_ *= k;
        for (auto& [v, c] : coeffs_) c *= k;
        return *this;
    }

    friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
    friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }
    friend LinearTerm operator*(LinearTerm a, const Rational& k) { return a *= k; }
    friend LinearTerm operator*(const Rational& k, LinearTerm a) { return a *= k; }
    friend LinearTerm operator-(LinearTerm a) { return a *= Rational(-1); }

    // Replaces v by `by` (which may itself mention other variables).
    LinearTerm substitute(const Var& v, const LinearTerm& by) const {
        auto it = coeffs_.find(v);
        if (it == coeffs_.end()) return *this;
        LinearTerm out = *this;
        Rational c = it->second;
        out.coeffs_.erase(v);
        out += by * c;
        return out;
    }

    Rational evaluate(const Model& m) const {
        Rational sum = constant_;
        for (const auto& [v, c] : coeffs_) {
            auto it = m.find(v);
            if (it == m.end()) throw UnboundVariable(v);
            sum += c * it->second;
        }
        return sum;
    }

    void collect_vars(VarSet& out) const {
        for (const auto& [v, c] : coeffs_) out.insert(v);
    }

    friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }

    friend std::strong_ordering operator<=>(const LinearTerm& a, const LinearTerm& b) {
        auto ia = a.coeffs_.begin();
        auto ib = b.coeffs_.begin();
        for (; ia != a.coeffs_.end() && ib != b.coeffs_.end(); ++ia, ++ib) {
            if (auto c = ia->first <=> ib->first; c != 0) return c;
            if (auto c = compare(ia->second, ib->second); c != 0) return c;
        }
        if (ia != a.coeffs_.end()) return std::strong_ordering::greater;
        if (ib != b.coeffs_.end()) return std::strong_ordering::less;
        return compare(a.constant_, b.constant_);
    }

private:
    Rational constant_{0};
    Coeffs coeffs_;
};

enum class Relation { GE, GT, EQ };

inline const char* relation_symbol(Relation r) {
    switch (r) {
    case Relation::GE: return ">=";
    case Relation::GT: return ">";
    case Relation::EQ: return "=";
    }
    return "?";
}

inline bool relation_holds(Relation r, const Rational& value) {
    switch (r) {
    case Relation::GE: return value >= 0;
    case Relation::GT: return value > 0;
    case Relation::EQ: return value == 0;
    }
    return false;
}

// `term rel 0`, kept in a canonical form so that positive rescalings of the
// same constraint compare equal: coefficients and constant are integers with
// gcd 1 (ground atoms reduce the constant to its sign), and equalities have a
// positive leading coefficient.
class Atom {
public:
    Atom(LinearTerm term, Relation rel) : term_(std::move(term)), rel_(rel) { canonicalize(); }

    const LinearTerm& term() const { return term_; }
    Relation rel() const { return rel_; }

    bool is_ground() const { return term_.is_constant(); }
    bool ground_value() const { return relation_holds(rel_, term_.constant()); }
    bool mentions(const Var& v) const { return term_.mentions(v); }

    bool holds(const Model& m) const { return relation_holds(rel_, term_.evaluate(m)); }

    // The complement of a non-strict or strict inequality is again an atom;
    // the complement of an equality is a disjunction and has no atom form.
    std::optional<Atom> complement() const {
        switch (rel_) {
        case Relation::GE: return Atom(-term_, Relation::GT);
        case Relation::GT: return Atom(-term_, Relation::GE);
        case Relation::EQ: return std::nullopt;
        }
        return std::nullopt;
    }

    static Atom ground_false() { return Atom(LinearTerm(Rational(-1)), Relation::GE); }

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.rel_ == b.rel_ && a.term_ == b.term_;
    }
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
        if (auto c = a.term_ <=> b.term_; c != 0) return c;
        return a.rel_ <=> b.rel_;
    }

private:
    void canonicalize() {
        if (term_.is_constant()) {
            term_ = LinearTerm(Rational(sign(term_.constant())));
            if (rel_ == Relation::EQ && term_.constant() < 0) term_ = LinearTerm(Rational(1));
            return;
        }
        Integer den = term_.constant().get_den();
        for (const auto& [v, c] : term_.coeffs()) den = lcm(den, c.get_den());
        Integer num = abs(term_.constant().get_num());
        for (const auto& [v, c] : term_.coeffs()) num = gcd(num, c.get_num());
        Rational scale(den, num);
        scale.canonicalize();
        if (rel_ == Relation::EQ && term_.leading_coeff() < 0) scale = -scale;
        if (scale != 1) term_ *= scale;
    }

    LinearTerm term_;
    Relation rel_;
};

// Bit size of the largest integer coefficient or constant of a canonical atom.
inline std::size_t coefficient_bits(const Atom& a) {
    std::size_t bits = bit_size(a.term().constant().get_num());
    for (const auto& [v, c] : a.term().coeffs()) bits = std::max(bits, bit_size(c.get_num()));
    return bits;
}

} // namespace qelim
