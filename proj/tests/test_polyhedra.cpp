#include "support.hpp"

#include <algorithm>
#include <gtest/gtest.h>

using namespace qtest;

namespace {

ConstraintSystem sys(std::initializer_list<const char*> atoms) {
    ConstraintSystem s;
    for (const char* a : atoms) s.add(A(a));
    return s;
}

Model witness_of(const ConstraintSystem& s) {
    auto r = feasible(s);
    EXPECT_TRUE(is_feasible(r));
    return std::get<Feasible>(r).witness;
}

// Sample points of the system's solution set: the simplex witness plus its
// images after tightening by random extra constraints.
std::vector<Model> samples(const ConstraintSystem& s, SplitMix64& rng, const std::vector<Var>& vars, int tries) {
    std::vector<Model> out;
    for (int i = 0; i < tries; ++i) {
        ConstraintSystem t = s;
        for (int k = 0; k < 2; ++k) t.add(random_atom(rng, vars, -4, 4, false));
        auto r = feasible(t);
        if (!is_feasible(r)) continue;
        Model m = std::get<Feasible>(r).witness;
        complete_model(m, VarSet(vars.begin(), vars.end()));
        out.push_back(m);
    }
    return out;
}

} // namespace

TEST(Feasible, Examples) {
    EXPECT_FALSE(is_feasible(sys({"(>= x 0)", "(>= (- -1 x) 0)"})));
    Model m = witness_of(sys({"(>= (- x 1) 0)", "(>= (- 1 x) 0)"}));
    EXPECT_EQ(m.at(V("x")), 1);
    ConstraintSystem open = sys({"(> x 0)", "(> (- 1 x) 0)"});
    Model w = witness_of(open);
    EXPECT_TRUE(open.satisfied_by(w));
    EXPECT_TRUE(is_feasible(ConstraintSystem{}));
}

TEST(Feasible, CoreIsInfeasible) {
    ConstraintSystem s = sys({"(>= y 5)", "(>= x 0)", "(> z 1)", "(< x 0)", "(<= y 9)"});
    auto r = feasible(s);
    ASSERT_FALSE(is_feasible(r));
    std::vector<Atom> core;
    for (auto i : std::get<Infeasible>(r).core) core.push_back(s[i]);
    EXPECT_FALSE(is_feasible(feasible(core)));
}

TEST(Feasible, WitnessesSatisfyRandomSystems) {
    SplitMix64 rng(3);
    auto vars = make_vars(4);
    int feasible_count = 0;
    for (int i = 0; i < 400; ++i) {
        ConstraintSystem s = random_system(rng, vars, 1 + rng.below(8));
        auto r = feasible(s);
        if (is_feasible(r)) {
            ++feasible_count;
            Model m = std::get<Feasible>(r).witness;
            complete_model(m, VarSet(vars.begin(), vars.end()));
            EXPECT_TRUE(s.satisfied_by(m));
        } else {
            std::vector<Atom> core;
            for (auto k : std::get<Infeasible>(r).core) core.push_back(s[k]);
            EXPECT_FALSE(is_feasible(feasible(core)));
            // Independent check: no grid point satisfies an infeasible system.
            bool hit = false;
            for_grid(vars, -2, 2, 1, [&](const Model& g) { hit = hit || s.satisfied_by(g); });
            EXPECT_FALSE(hit);
        }
    }
    EXPECT_GT(feasible_count, 50);
}

TEST(Redundancy, Examples) {
    EXPECT_TRUE(is_redundant(sys({"(>= x 0)", "(>= x 1)"}), 0));
    EXPECT_FALSE(is_redundant(sys({"(>= x 0)", "(>= y 0)"}), 0));
    EXPECT_TRUE(is_redundant(sys({"(>= x 0)", "(>= (- x) 0)", "(= x 0)"}), 2));
    EXPECT_THROW(is_redundant(sys({"(>= x 0)"}), 1), std::out_of_range);
    EXPECT_EQ(remove_redundant(sys({"(>= x 0)", "(>= x 1)", "(>= x 2)"})), sys({"(>= x 2)"}));
    EXPECT_TRUE(remove_redundant(ConstraintSystem{}).empty());
}

TEST(Redundancy, GridPreservedAndIrredundant) {
    SplitMix64 rng(17);
    auto vars = make_vars(2);
    for (int round = 0; round < 8; ++round) {
        ConstraintSystem s;
        for (int i = 0; i < 20; ++i) s.add(random_atom(rng, vars, -6, 6, false));
        ConstraintSystem r = remove_redundant(s);
        for (std::size_t i = 0; i < r.size(); ++i) {
            auto it = std::find(s.constraints().begin(), s.constraints().end(), r[i]);
            EXPECT_TRUE(it != s.constraints().end() || r.is_trivially_false());
        }
        for_grid(vars, -5, 5, 1, [&](const Model& m) { EXPECT_EQ(s.satisfied_by(m), r.satisfied_by(m)); });
        if (!r.is_trivially_false())
            for (std::size_t i = 0; i < r.size(); ++i) EXPECT_FALSE(is_redundant(r, i));
    }
}

TEST(FourierMotzkin, Examples) {
    Var x = V("x");
    EXPECT_EQ(fm_eliminate(sys({"(>= x y)", "(>= z x)"}), x), sys({"(>= z y)"}));
    ConstraintSystem fig = sys({"(>= y -2)", "(>= x -1)", "(<= x 1)"});
    ConstraintSystem step = fm_eliminate(fig, x);
    EXPECT_EQ(step, sys({"(>= y -2)"})); // 2 >= 0 folds away at construction
    EXPECT_EQ(remove_redundant(step), sys({"(>= y -2)"}));
    EXPECT_EQ(fm_eliminate(sys({"(>= y 0)"}), x), sys({"(>= y 0)"}));
}

TEST(FourierMotzkin, StrictnessAndEquality) {
    Var x = V("x");
    EXPECT_EQ(fm_eliminate(sys({"(> x y)", "(>= z x)"}), x), sys({"(> z y)"}));
    // x = 2y substitutes into the other constraints.
    EXPECT_EQ(fm_eliminate(sys({"(= x (* 2 y))", "(>= x 1)", "(< x z)"}), x),
              sys({"(>= (* 2 y) 1)", "(< (* 2 y) z)"}));
}

TEST(FourierMotzkin, PairCountBound) {
    SplitMix64 rng(23);
    auto vars = make_vars(3);
    Var x = vars[0];
    for (int i = 0; i < 100; ++i) {
        ConstraintSystem s = random_system(rng, vars, 2 + rng.below(10));
        bool has_eq = std::any_of(s.constraints().begin(), s.constraints().end(),
                                  [&](const Atom& a) { return a.rel() == Relation::EQ && a.mentions(x); });
        if (has_eq || s.is_trivially_false()) continue;
        std::size_t lo = 0, up = 0, rest = 0;
        for (const auto& a : s.constraints()) {
            auto c = a.term().coeff(x);
            (c > 0 ? lo : c < 0 ? up : rest)++;
        }
        ConstraintSystem out = fm_eliminate(s, x);
        EXPECT_FALSE(out.mentions(x));
        EXPECT_LE(out.size(), lo * up + rest + 1);
    }
}

TEST(Project, Examples) {
    Var x = V("x");
    ConstraintSystem s = sys({"(>= x y)", "(>= z x)", "(>= x 0)"});
    ConstraintSystem p = project(s, {x});
    ConstraintSystem expect = sys({"(>= z y)", "(>= z 0)"});
    EXPECT_FALSE(grid_disagreement(p.to_formula(), expect.to_formula()).has_value());
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(project(s, std::span<const Var>{}), remove_redundant(s));
    EXPECT_TRUE(project(sys({"(>= x 0)"}), {x}).empty());
}

// Soundness, completeness and the coefficient bound on 100 random systems.
TEST(Project, RandomProperties) {
    SplitMix64 rng(99);
    for (int round = 0; round < 100; ++round) {
        int nv = 2 + static_cast<int>(rng.below(4));
        auto vars = make_vars(nv);
        ConstraintSystem s = random_system(rng, vars, 1 + rng.below(12));
        std::vector<Var> elim;
        for (const auto& v : vars)
            if (rng.below(2)) elim.push_back(v);
        std::vector<Var> kept;
        for (const auto& v : vars)
            if (std::find(elim.begin(), elim.end(), v) == elim.end()) kept.push_back(v);

        ConstraintSystem cur = s;
        for (const auto& v : elim) {
            std::size_t bits = max_coefficient_bits(cur);
            ConstraintSystem next = fm_eliminate(cur, v);
            EXPECT_LE(max_coefficient_bits(next), 2 * bits + 1);
            cur = remove_redundant(next);
        }
        ConstraintSystem p = project(s, elim);
        for (const auto& v : elim) EXPECT_FALSE(p.mentions(v));

        // Soundness: restrictions of models of s satisfy p.
        for (const auto& m : samples(s, rng, vars, 6)) {
            Model r;
            for (const auto& v : kept) r[v] = m.at(v);
            EXPECT_TRUE(p.satisfied_by(r));
        }
        // Completeness: points of p extend to models of s.
        if (p.is_trivially_false()) {
            EXPECT_FALSE(is_feasible(s));
            continue;
        }
        for (const auto& pt : samples(p, rng, kept.empty() ? vars : kept, 6)) {
            ConstraintSystem fixed = s;
            for (const auto& v : kept) fixed.add(Atom(LinearTerm::variable(v) - LinearTerm(pt.at(v)), Relation::EQ));
            EXPECT_TRUE(is_feasible(fixed));
        }
    }
}

TEST(Project, OrderIndependentOnGrid) {
    SplitMix64 rng(7);
    auto vars = make_vars(3);
    for (int round = 0; round < 30; ++round) {
        ConstraintSystem s = random_system(rng, vars, 2 + rng.below(6));
        std::vector<Var> order{vars[0], vars[1]};
        std::vector<Var> reversed{vars[1], vars[0]};
        Formula a = project(s, order).to_formula();
        Formula b = project(s, reversed).to_formula();
        EXPECT_FALSE(grid_disagreement(a, b, -6, 6, Rational(1, 2)).has_value());
    }
}
