#pragma once

// Small incremental CDCL solver: two watched literals, first-UIP learning,
// decisions on the lowest-numbered unassigned variable with saved phases.
// No restarts and no clause deletion, so runs are fully deterministic.
// Clauses may be added between calls to solve(); assumptions are decided
// first, in order.

#include "qelim/budget.hpp"

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace qelim::sat {

// Literal encoding: 2 * var for the positive literal, 2 * var + 1 for its negation.
struct Lit {
    int code = 0;

    static Lit pos(int var) { return Lit{2 * var}; }
    static Lit neg(int var) { return Lit{2 * var + 1}; }
    int var() const { return code >> 1; }
    bool negative() const { return code & 1; }
    Lit operator~() const { return Lit{code ^ 1}; }
    friend bool operator==(Lit a, Lit b) { return a.code == b.code; }
};

enum class Value : std::int8_t { False = -1, Undef = 0, True = 1 };

enum class Result { Sat, Unsat };

class Solver {
public:
    int new_var() {
        int v = static_cast<int>(assign_.size());
        assign_.push_back(Value::Undef);
        level_.push_back(0);
        reason_.push_back(-1);
        phase_.push_back(false);
        seen_.push_back(false);
        watches_.emplace_back();
        watches_.emplace_back();
        return v;
    }

    int num_vars() const { return static_cast<int>(assign_.size()); }
    int num_clauses() const { return static_cast<int>(clauses_.size()); }
    std::uint64_t conflicts() const { return conflicts_; }

    // Returns false once the clause set is unsatisfiable at level 0.
    bool add_clause(std::vector<Lit> lits) {
        if (!ok_) return false;
        cancel_until(0);
        std::vector<Lit> c;
        for (Lit l : lits) {
            Value v = value(l);
            if (v == Value::True) return true;
            if (v == Value::False) continue;
            bool dup = false, taut = false;
            for (Lit k : c) {
                if (k == l) dup = true;
                if (k == ~l) taut = true;
            }
            if (taut) return true;
            if (!dup) c.push_back(l);
        }
        if (c.empty()) return ok_ = false;
        if (c.size() == 1) {
            enqueue(c[0], -1);
            if (propagate() >= 0) ok_ = false;
            return ok_;
        }
        attach(std::move(c));
        return true;
    }

    Result solve(std::span<const Lit> assumptions = {}) {
        if (!ok_) return Result::Unsat;
        cancel_until(0);
        if (propagate() >= 0) {
            ok_ = false;
            return Result::Unsat;
        }
        while (true) {
            int confl = propagate();
            if (confl >= 0) {
                ++conflicts_;
                if ((conflicts_ & 255) == 0) Budget::poll();
                if (decision_level() == 0) {
                    ok_ = false;
                    return Result::Unsat;
                }
                int back = 0;
                std::vector<Lit> learnt = analyze(confl, back);
                cancel_until(back);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    int ci = attach(learnt);
                    enqueue(learnt[0], ci);
                }
                continue;
            }
            // Assumptions occupy the first decision levels.
            Lit next{-1};
            while (decision_level() < static_cast<int>(assumptions.size())) {
                Lit a = assumptions[decision_level()];
                Value v = value(a);
                if (v == Value::True) {
                    trail_lim_.push_back(static_cast<int>(trail_.size()));
                } else if (v == Value::False) {
                    return Result::Unsat;
                } else {
                    next = a;
                    break;
                }
            }
            if (next.code < 0) {
                int v = pick_branch_var();
                if (v < 0) return Result::Sat;
                next = phase_[v] ? Lit::pos(v) : Lit::neg(v);
                if ((++decisions_ & 1023) == 0) Budget::poll();
            }
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            enqueue(next, -1);
        }
    }

    // Assignment after a Sat result (valid until the next add_clause/solve).
    bool model_value(int var) const { return assign_[var] == Value::True; }

    Value value(Lit l) const {
        Value v = assign_[l.var()];
        if (v == Value::Undef) return v;
        bool t = (v == Value::True) != l.negative();
        return t ? Value::True : Value::False;
    }

private:
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    int attach(std::vector<Lit> c) {
        int ci = static_cast<int>(clauses_.size());
        watches_[(~c[0]).code].push_back(ci);
        watches_[(~c[1]).code].push_back(ci);
        clauses_.push_back(std::move(c));
        return ci;
    }

    void enqueue(Lit l, int reason) {
        int v = l.var();
        assign_[v] = l.negative() ? Value::False : Value::True;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    // Returns the index of a conflicting clause, or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            // Clauses watching ~p (now false) are stored under p's code.
            auto& ws = watches_[p.code];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                int ci = ws[i];
                auto& c = clauses_[ci];
                Lit false_lit = ~p;
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (value(c[0]) == Value::True) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (value(c[k]) != Value::False) {
                        std::swap(c[1], c[k]);
                        watches_[(~c[1]).code].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[keep++] = ci;
                if (value(c[0]) == Value::False) {
                    for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                    ws.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueue(c[0], ci);
            }
            ws.resize(keep);
        }
        return -1;
    }

    std::vector<Lit> analyze(int confl, int& back_level) {
        std::vector<Lit> learnt{Lit{}};
        int pending = 0;
        Lit p{-1};
        std::size_t idx = trail_.size();
        std::vector<int> touched;
        do {
            const auto& c = clauses_[confl];
            for (std::size_t k = (p.code < 0 ? 0 : 1); k < c.size(); ++k) {
                Lit q = c[k];
                int v = q.var();
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = true;
                touched.push_back(v);
                if (level_[v] >= decision_level()) ++pending;
                else learnt.push_back(q);
            }
            do {
                p = trail_[--idx];
            } while (!seen_[p.var()]);
            confl = reason_[p.var()];
            seen_[p.var()] = false;
            --pending;
        } while (pending > 0);
        learnt[0] = ~p;
        for (int v : touched) seen_[v] = false;

        back_level = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k)
                if (level_[learnt[k].var()] > level_[learnt[max_i].var()]) max_i = k;
            std::swap(learnt[1], learnt[max_i]);
            back_level = level_[learnt[1].var()];
        }
        return learnt;
    }

    void cancel_until(int level) {
        if (decision_level() <= level) return;
        for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; --i) {
            int v = trail_[i].var();
            phase_[v] = assign_[v] == Value::True;
            assign_[v] = Value::Undef;
            reason_[v] = -1;
            if (v < next_var_) next_var_ = v;
        }
        trail_.resize(trail_lim_[level]);
        trail_lim_.resize(level);
        qhead_ = trail_.size();
    }

    int pick_branch_var() {
        while (next_var_ < num_vars() && assign_[next_var_] != Value::Undef) ++next_var_;
        return next_var_ < num_vars() ? next_var_ : -1;
    }

    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<int>> watches_; // by literal code: clauses watching its negation
    std::vector<Value> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<bool> phase_;
    std::vector<bool> seen_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    int next_var_ = 0;
    bool ok_ = true;
    std::uint64_t conflicts_ = 0;
    std::uint64_t decisions_ = 0;
};

} // namespace qelim::sat
