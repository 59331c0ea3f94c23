#pragma once

// `qelim` command-line front end. Exit codes: 0 success, 1 input error,
// 2 resource limit, 3 negative verdict (invariant violations under
// --verify-invariants, or `equiv` on inequivalent formulas).

#include "qelim/bench.hpp"
#include "qelim/io.hpp"
#include "qelim/qe.hpp"
#include "qelim/smt.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qelim {

namespace detail {

inline void write_stats(std::ostream& err, const std::string& algorithm, const QeOutput& out, double wall_ms) {
    const ElimStats& s = out.stats;
    err << "algorithm=" << algorithm << '\n'
        << "eliminations=" << s.eliminations << '\n'
        << "iterations=" << s.iterations << '\n'
        << "smt_calls=" << s.smt_calls << '\n'
        << "generalize2_relaxations=" << s.generalize2_relaxations << '\n'
        << "projections=" << s.projection_count << '\n'
        << "max_atoms=" << s.max_atom_count << '\n'
        << "output_atoms=" << atom_occurrences(out.formula) << '\n'
        << "smt_ms=" << s.smt_ms << '\n'
        << "generalize_ms=" << s.generalize_ms << '\n'
        << "project_ms=" << s.project_ms << '\n'
        << "wall_ms=" << wall_ms << '\n'
        << "invariant_violations=" << s.violations.size() << '\n';
}

// Parse errors are reported as FILE:LINE:COLUMN: message.
inline Formula read_formula(const std::string& path) {
    try {
        return parse_file(path);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ":" + e.what());
    }
}

// Eliminates quantifiers when present so that SMT-level commands accept any input.
inline Formula quantifier_free(const Formula& f) {
    return is_quantifier_free(f) ? f : eliminate_all(f).formula;
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantifier elimination for linear real arithmetic"};
    app.require_subcommand(1);

    auto* elim = app.add_subcommand("eliminate", "Eliminate all quantifiers from a formula file");
    std::string algorithm = "main";
    bool no_block_projected = false, add_blocking_to_g = false, verify = false, stats = false, reverse = false;
    std::string assume_file, elim_file;
    std::optional<long long> timeout_ms;
    elim->add_option("--algorithm", algorithm, "main, mod1, mod2 or lw")
        ->check(CLI::IsMember({"main", "mod1", "mod2", "lw"}));
    elim->add_flag("--no-block-projected-model", no_block_projected, "Block generalized models instead of projections (mod1)");
    elim->add_flag("--add-blocking-to-g", add_blocking_to_g, "Also block projections in the generalization check (mod2)");
    elim->add_option("--assume", assume_file, "Eliminate modulo the assumption in this file");
    elim->add_flag("--verify-invariants", verify, "Check loop invariants at every iteration (slow)");
    elim->add_flag("--stats", stats, "Write key=value statistics to stderr");
    elim->add_flag("--reverse-order", reverse, "Relax conjuncts in reverse atom order");
    elim->add_option("--timeout-ms", timeout_ms, "Wall-clock limit in milliseconds");
    elim->add_option("file", elim_file, "Formula file (.qel)")->required();

    auto* sat_cmd = app.add_subcommand("check-sat", "Decide satisfiability and print a model");
    std::string sat_file;
    sat_cmd->add_option("file", sat_file, "Formula file (.qel)")->required();

    auto* equiv_cmd = app.add_subcommand("equiv", "Decide whether two formulas are equivalent");
    std::string equiv_a, equiv_b;
    equiv_cmd->add_option("first", equiv_a, "Formula file")->required();
    equiv_cmd->add_option("second", equiv_b, "Formula file")->required();

    auto* gen_cmd = app.add_subcommand("gen", "Print a random formula");
    GenParams gp;
    std::string quant_prob = "1/4";
    gen_cmd->add_option("--vars", gp.num_vars, "Number of variables");
    gen_cmd->add_option("--depth", gp.depth, "Formula depth");
    gen_cmd->add_option("--coeff-min", gp.coeff_min, "Smallest coefficient");
    gen_cmd->add_option("--coeff-max", gp.coeff_max, "Largest coefficient");
    gen_cmd->add_option("--quant-prob", quant_prob, "Quantifier probability, e.g. 1/4");
    gen_cmd->add_option("--seed", gp.seed, "Seed");

    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
    std::string bench_file, bench_out;
    bench_cmd->add_option("config", bench_file, "Benchmark configuration (key=value)")->required();
    bench_cmd->add_option("--out", bench_out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*elim) {
            if (no_block_projected && add_blocking_to_g) {
                err << "error: --no-block-projected-model and --add-blocking-to-g are exclusive\n";
                return 1;
            }
            if (no_block_projected) algorithm = "mod1";
            if (add_blocking_to_g) algorithm = "mod2";
            Formula f = detail::read_formula(elim_file);
            ElimOptions opt;
            opt.verify_invariants = verify;
            opt.reverse_generalize_order = reverse;
            if (!assume_file.empty()) opt.assumption = detail::read_formula(assume_file);
            Budget::Limits limits;
            if (timeout_ms) limits = Budget::with_timeout(std::chrono::milliseconds(*timeout_ms));
            Budget::Scope scope(limits);
            auto t0 = std::chrono::steady_clock::now();
            QeOutput result = run_algorithm(algorithm, f, opt);
            double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out << print(result.formula) << '\n';
            if (stats) detail::write_stats(err, algorithm, result, wall);
            for (const auto& v : result.stats.violations) err << "violation: " << v << '\n';
            return result.stats.violations.empty() ? 0 : 3;
        }
        if (*sat_cmd) {
            Formula f = detail::quantifier_free(detail::read_formula(sat_file));
            auto m = check_sat(f);
            if (!m) {
                out << "unsat\n";
                return 0;
            }
            out << "sat\n(model";
            for (const auto& [v, q] : *m) out << " (" << v.name() << ' ' << to_string(q) << ')';
            out << ")\n";
            return 0;
        }
        if (*equiv_cmd) {
            Formula a = detail::quantifier_free(detail::read_formula(equiv_a));
            Formula b = detail::quantifier_free(detail::read_formula(equiv_b));
            for (const auto& probe : {mk_and({a, mk_not(b)}), mk_and({b, mk_not(a)})}) {
                if (auto m = check_sat(probe)) {
                    out << "not equivalent\n(counterexample";
                    for (const auto& [v, q] : *m) out << " (" << v.name() << ' ' << to_string(q) << ')';
                    out << ")\n";
                    return 3;
                }
            }
            out << "equivalent\n";
            return 0;
        }
        if (*gen_cmd) {
            gp.quantifier_prob = parse_rational(quant_prob);
            out << print(gen_random(gp)) << '\n';
            return 0;
        }
        if (*bench_cmd) {
            std::ifstream in(bench_file);
            if (!in) throw std::runtime_error("cannot open " + bench_file);
            std::stringstream ss;
            ss << in.rdbuf();
            BenchConfig cfg = parse_bench_config(ss.str());
            if (!bench_out.empty()) cfg.out = bench_out;
            auto records = bench_run(bench_instances(cfg), cfg);
            print_summary(out, summarize(records, cfg.algorithms));
            if (cfg.out.empty()) {
                write_csv(out, records);
            } else {
                std::ofstream csv(cfg.out);
                if (!csv) throw std::runtime_error("cannot write " + cfg.out);
                write_csv(csv, records);
            }
            return 0;
        }
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace qelim
