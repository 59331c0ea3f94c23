#pragma once

// Exact feasibility of conjunctions of linear constraints, by the bounded
// general simplex over delta-rationals: a strict bound `s > b` becomes the
// bound `s >= b + delta` for a symbolic positive infinitesimal delta, and a
// concrete rational value of delta is chosen afterwards to produce a genuine
// rational witness.

#include "qelim/budget.hpp"
#include "qelim/term.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace qelim {

// r + k * delta
struct DeltaRational {
    Rational real{0};
    Rational delta{0};

    friend DeltaRational operator+(const DeltaRational& a, const DeltaRational& b) {
        return {a.real + b.real, a.delta + b.delta};
    }
    friend DeltaRational operator-(const DeltaRational& a, const DeltaRational& b) {
        return {a.real - b.real, a.delta - b.delta};
    }
    friend DeltaRational operator*(const DeltaRational& a, const Rational& k) {
        return {a.real * k, a.delta * k};
    }
    friend bool operator==(const DeltaRational& a, const DeltaRational& b) {
        return a.real == b.real && a.delta == b.delta;
    }
    friend bool operator<(const DeltaRational& a, const DeltaRational& b) {
        int c = cmp(a.real, b.real);
        return c < 0 || (c == 0 && a.delta < b.delta);
    }
    friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return b < a; }
    friend bool operator<=(const DeltaRational& a, const DeltaRational& b) { return !(b < a); }
    friend bool operator>=(const DeltaRational& a, const DeltaRational& b) { return !(a < b); }
};

struct Feasible {
    Model witness;
};

// Indices (into the checked constraint list) of a jointly infeasible subset.
struct Infeasible {
    std::vector<std::size_t> core;
};

using FeasibilityResult = std::variant<Feasible, Infeasible>;

inline bool is_feasible(const FeasibilityResult& r) { return std::holds_alternative<Feasible>(r); }

class Simplex {
public:
    explicit Simplex(std::span<const Atom> constraints) {
        for (std::size_t i = 0; i < constraints.size(); ++i) add_constraint(constraints[i], i);
    }

    FeasibilityResult check() {
        if (conflict_) return Infeasible{*conflict_};
        // Move nonbasic columns inside their bounds.
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (cols_[j].row >= 0) continue;
            if (cols_[j].lower && value_[j] < cols_[j].lower->value) update(j, cols_[j].lower->value);
            else if (cols_[j].upper && value_[j] > cols_[j].upper->value) update(j, cols_[j].upper->value);
        }
        std::size_t steps = 0;
        while (true) {
            if ((++steps & 63) == 0) Budget::poll();
            // Bland's rule: smallest violating basic column, smallest entering column.
            std::optional<std::size_t> leaving;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                std::size_t b = basic_[r];
                if (violates(b) && (!leaving || b < basic_[*leaving])) leaving = r;
            }
            if (!leaving) return Feasible{witness()};
            std::size_t r = *leaving;
            std::size_t b = basic_[r];
            const bool below = cols_[b].lower && value_[b] < cols_[b].lower->value;
            std::optional<std::size_t> entering;
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                if (cols_[j].row >= 0) continue;
                const Rational& a = rows_[r][j];
                if (a == 0) continue;
                bool can_rise = !cols_[j].upper || value_[j] < cols_[j].upper->value;
                bool can_fall = !cols_[j].lower || value_[j] > cols_[j].lower->value;
                bool ok = below ? (a > 0 ? can_rise : can_fall) : (a > 0 ? can_fall : can_rise);
                if (ok) {
                    entering = j;
                    break;
                }
            }
            if (!entering) return Infeasible{explain(r, below)};
            pivot_and_update(r, *entering, below ? cols_[b].lower->value : cols_[b].upper->value);
        }
    }

private:
    struct Bound {
        DeltaRational value;
        std::size_t reason;
    };
    struct Column {
        std::optional<Bound> lower;
        std::optional<Bound> upper;
        int row = -1; // row index when basic
    };

    void add_constraint(const Atom& atom, std::size_t index) {
        const LinearTerm& t = atom.term();
        if (t.is_constant()) {
            if (!atom.ground_value() && !conflict_) conflict_ = std::vector<std::size_t>{index};
            return;
        }
        // Split t = factor * form + c where form has coprime integer
        // coefficients and a positive leading coefficient, so that parallel
        // constraints share one column.
        Integer g = 0;
        for (const auto& [v, c] : t.coeffs()) g = gcd(g, c.get_num());
        Rational factor(g);
        if (t.leading_coeff() < 0) factor = -factor;
        LinearTerm::Coeffs form;
        for (const auto& [v, c] : t.coeffs()) form.emplace(v, c / factor);
        std::size_t col = column_for(form);
        // factor * s + c  rel 0   <=>   s rel' -c / factor
        Rational bound = -t.constant() / factor;
        const bool flip = factor < 0;
        switch (atom.rel()) {
        case Relation::GE:
            if (!flip) assert_lower(col, {bound, 0}, index);
            else assert_upper(col, {bound, 0}, index);
            break;
        case Relation::GT:
            if (!flip) assert_lower(col, {bound, 1}, index);
            else assert_upper(col, {bound, -1}, index);
            break;
        case Relation::EQ:
            assert_lower(col, {bound, 0}, index);
            assert_upper(col, {bound, 0}, index);
            break;
        }
    }

    std::size_t var_column(const Var& v) {
        auto [it, inserted] = var_cols_.try_emplace(v, cols_.size());
        if (inserted) new_column();
        return it->second;
    }

    std::size_t column_for(const LinearTerm::Coeffs& form) {
        if (form.size() == 1 && form.begin()->second == 1) return var_column(form.begin()->first);
        auto it = slack_cols_.find(form);
        if (it != slack_cols_.end()) return it->second;
        std::vector<std::pair<std::size_t, Rational>> entries;
        for (const auto& [v, c] : form) entries.emplace_back(var_column(v), c);
        std::size_t s = new_column();
        slack_cols_.emplace(form, s);
        // s = sum c_v v, rewritten over the current nonbasic columns.
        std::vector<Rational> row(cols_.size());
        for (const auto& [j, c] : entries) {
            if (cols_[j].row < 0) {
                row[j] += c;
            } else {
                const auto& other = rows_[cols_[j].row];
                for (std::size_t k = 0; k < other.size(); ++k)
                    if (other[k] != 0) row[k] += c * other[k];
            }
        }
        DeltaRational v;
        for (std::size_t k = 0; k < row.size(); ++k)
            if (row[k] != 0) v = v + value_[k] * row[k];
        value_[s] = v;
        cols_[s].row = static_cast<int>(rows_.size());
        rows_.push_back(std::move(row));
        basic_.push_back(s);
        return s;
    }

    std::size_t new_column() {
        cols_.emplace_back();
        value_.emplace_back();
        for (auto& row : rows_) row.emplace_back(0);
        return cols_.size() - 1;
    }

    void assert_lower(std::size_t col, DeltaRational b, std::size_t reason) {
        auto& c = cols_[col];
        if (c.lower && b <= c.lower->value) return;
        c.lower = Bound{b, reason};
        if (c.upper && c.upper->value < b && !conflict_) conflict_ = std::vector<std::size_t>{c.upper->reason, reason};
    }

    void assert_upper(std::size_t col, DeltaRational b, std::size_t reason) {
        auto& c = cols_[col];
        if (c.upper && b >= c.upper->value) return;
        c.upper = Bound{b, reason};
        if (c.lower && b < c.lower->value && !conflict_) conflict_ = std::vector<std::size_t>{c.lower->reason, reason};
    }

    bool violates(std::size_t j) const {
        const auto& c = cols_[j];
        return (c.lower && value_[j] < c.lower->value) || (c.upper && value_[j] > c.upper->value);
    }

    // Sets a nonbasic column to v and updates the basic columns.
    void update(std::size_t j, const DeltaRational& v) {
        DeltaRational diff = v - value_[j];
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (rows_[r][j] != 0) value_[basic_[r]] = value_[basic_[r]] + diff * rows_[r][j];
        value_[j] = v;
    }

    void pivot_and_update(std::size_t r, std::size_t j, const DeltaRational& v) {
        std::size_t b = basic_[r];
        DeltaRational theta = (v - value_[b]) * (Rational(1) / rows_[r][j]);
        value_[b] = v;
        value_[j] = value_[j] + theta;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (k != r && rows_[k][j] != 0) value_[basic_[k]] = value_[basic_[k]] + theta * rows_[k][j];
        pivot(r, j);
    }

    // Exchanges basic column basic_[r] with nonbasic column j.
    void pivot(std::size_t r, std::size_t j) {
        std::size_t b = basic_[r];
        auto& row = rows_[r];
        Rational a = row[j];
        // b = a*j + rest  =>  j = (b - rest) / a
        Rational inv = Rational(1) / a;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k == j) continue;
            if (row[k] != 0) row[k] = -row[k] * inv;
        }
        row[b] = inv;
        row[j] = 0;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == r) continue;
            auto& other = rows_[k];
            Rational c = other[j];
            if (c == 0) continue;
            other[j] = 0;
            for (std::size_t m = 0; m < row.size(); ++m)
                if (row[m] != 0) other[m] += c * row[m];
        }
        basic_[r] = j;
        cols_[j].row = static_cast<int>(r);
        cols_[b].row = -1;
    }

    std::vector<std::size_t> explain(std::size_t r, bool below) const {
        std::size_t b = basic_[r];
        std::vector<std::size_t> core;
        core.push_back(below ? cols_[b].lower->reason : cols_[b].upper->reason);
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (cols_[j].row >= 0) continue;
            const Rational& a = rows_[r][j];
            if (a == 0) continue;
            // The bound that stopped column j from helping.
            bool use_upper = below ? a > 0 : a < 0;
            core.push_back(use_upper ? cols_[j].upper->reason : cols_[j].lower->reason);
        }
        std::sort(core.begin(), core.end());
        core.erase(std::unique(core.begin(), core.end()), core.end());
        return core;
    }

    Model witness() const {
        // Largest concrete delta in (0, 1] keeping every bound satisfied.
        Rational delta = 1;
        auto tighten = [&](const DeltaRational& lo, const DeltaRational& hi) {
            // lo <= hi symbolically; need lo.real + lo.delta*d <= hi.real + hi.delta*d.
            if (lo.real < hi.real && lo.delta > hi.delta) {
                Rational d = (hi.real - lo.real) / (lo.delta - hi.delta);
                if (d < delta) delta = d;
            }
        };
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (cols_[j].lower) tighten(cols_[j].lower->value, value_[j]);
            if (cols_[j].upper) tighten(value_[j], cols_[j].upper->value);
        }
        Model m;
        for (const auto& [v, j] : var_cols_) m.emplace(v, value_[j].real + value_[j].delta * delta);
        return m;
    }

    std::vector<Column> cols_;
    std::vector<DeltaRational> value_;
    std::vector<std::vector<Rational>> rows_; // rows_[r][j]: basic_[r] = sum_j rows_[r][j] * col_j
    std::vector<std::size_t> basic_;
    std::map<Var, std::size_t> var_cols_;
    std::map<LinearTerm::Coeffs, std::size_t> slack_cols_;
    std::optional<std::vector<std::size_t>> conflict_;
};

inline FeasibilityResult feasible(std::span<const Atom> constraints) {
    Simplex s(constraints);
    return s.check();
}

} // namespace qelim
