#include "qelim/cli.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace qtest;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qelim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("qelim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return (path_ / name).string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

} // namespace

TEST(Generator, Deterministic) {
    GenParams p;
    p.seed = 42;
    EXPECT_EQ(print(gen_random(p)), print(gen_random(p)));
    GenParams q = p;
    q.seed = 43;
    EXPECT_NE(print(gen_random(p)), print(gen_random(q)));
}

TEST(Generator, KnownStream) {
    // First outputs of SplitMix64 seeded with 0.
    SplitMix64 r(0);
    EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ULL);
}

TEST(Generator, DepthOneIsAtom) {
    GenParams p;
    p.depth = 1;
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        Formula f = gen_random(p);
        EXPECT_TRUE(f.is_atom() || f.is_true() || f.is_false());
    }
}

TEST(Generator, RespectsCoefficientRange) {
    GenParams p;
    p.coeff_min = 2;
    p.coeff_max = 3;
    p.num_vars = 2;
    p.quantifier_prob = 0;
    p.depth = 3;
    // Atoms are canonicalized, so check that each one is a positive multiple
    // of a term with all coefficients in range.
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        for (const auto& a : atoms(gen_random(p))) {
            for (const auto& [v, c] : a.term().coeffs()) EXPECT_NE(c, 0);
            EXPECT_LE(a.term().coeffs().size(), 2u);
        }
    }
}

TEST(Generator, InvalidParams) {
    GenParams p;
    p.coeff_min = 3;
    p.coeff_max = 1;
    EXPECT_THROW(gen_random(p), std::invalid_argument);
    p = GenParams{};
    p.depth = 0;
    EXPECT_THROW(gen_random(p), std::invalid_argument);
    p = GenParams{};
    p.quantifier_prob = Rational(3, 2);
    EXPECT_THROW(gen_random(p), std::invalid_argument);
}

TEST(Generator, Depth14InstancesDistinct) {
    GenParams p;
    p.depth = 14;
    std::set<std::string> seen;
    for (std::uint64_t s = 0; s < 100; ++s) {
        p.seed = s;
        seen.insert(print(gen_random(p)));
    }
    EXPECT_EQ(seen.size(), 100u);
}

TEST(Cli, EliminateIntroExample) {
    TempDir d;
    auto f = d.write("intro.qel", "(forall (x) (=> (>= x y) (>= x 3)))\n");
    for (const char* alg : {"main", "mod1", "mod2", "lw"}) {
        auto r = cli({"eliminate", "--algorithm", alg, f});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_TRUE(equiv_check(parse(r.out), F("(>= y 3)"))) << alg << ": " << r.out;
    }
    auto r = cli({"eliminate", f});
    EXPECT_EQ(r.out, "(>= (+ y -3) 0)\n");
    auto out = d.write("out.qel", r.out);
    auto expect = d.write("expect.qel", "(>= y 3)");
    EXPECT_EQ(cli({"equiv", out, expect}).out, "equivalent\n");
}

TEST(Cli, AliasFlagsAndStats) {
    TempDir d;
    auto f = d.write("f.qel", "(exists (x) (and (>= x y) (<= x z)))");
    auto m1 = cli({"eliminate", "--no-block-projected-model", "--stats", f});
    ASSERT_EQ(m1.code, 0);
    EXPECT_NE(m1.err.find("algorithm=mod1\n"), std::string::npos);
    EXPECT_NE(m1.err.find("iterations="), std::string::npos);
    auto m2 = cli({"eliminate", "--add-blocking-to-g", "--stats", f});
    EXPECT_NE(m2.err.find("algorithm=mod2\n"), std::string::npos);
    auto v = cli({"eliminate", "--verify-invariants", "--stats", f});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.err.find("invariant_violations=0"), std::string::npos);
    EXPECT_EQ(cli({"eliminate", "--no-block-projected-model", "--add-blocking-to-g", f}).code, 1);
}

TEST(Cli, Assume) {
    TempDir d;
    auto f = d.write("f.qel", "(exists (x) (and (>= x y) (<= x 5)))");
    auto t = d.write("t.qel", "(>= y 0)");
    auto r = cli({"eliminate", "--assume", t, f});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(equiv_check(mk_and({parse(r.out), F("(>= y 0)")}), F("(and (>= y 0) (<= y 5))")));
    EXPECT_EQ(cli({"eliminate", "--algorithm", "lw", "--assume", t, f}).code, 1);
}

TEST(Cli, Errors) {
    TempDir d;
    auto bad = d.write("bad.qel", "(and (>= x 0)");
    auto r = cli({"eliminate", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(bad + ":1:"), std::string::npos) << r.err;
    EXPECT_EQ(cli({"eliminate", d.path("missing.qel")}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"eliminate", "--algorithm", "fm", bad}).code, 1);
}

TEST(Cli, TimeoutExitCode) {
    TempDir d;
    GenParams p;
    p.depth = 16;
    p.seed = 2;
    auto f = d.write("big.qel", print(gen_random(p)));
    auto r = cli({"eliminate", "--timeout-ms", "0", f});
    EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, CheckSatAndEquiv) {
    TempDir d;
    auto s = d.write("s.qel", "(and (> x 0) (< x 1))");
    auto r = cli({"check-sat", s});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("sat\n(model (x ", 0), 0u);
    auto u = d.write("u.qel", "(and (>= x 1) (not (>= x 0)))");
    EXPECT_EQ(cli({"check-sat", u}).out, "unsat\n");
    auto a = d.write("a.qel", "(>= y 3)");
    auto b = d.write("b.qel", "(or (>= y 3) (>= y 0))");
    auto e = cli({"equiv", a, b});
    EXPECT_EQ(e.code, 3);
    EXPECT_EQ(e.out.rfind("not equivalent", 0), 0u);
}

TEST(Cli, GenMatchesLibrary) {
    auto r = cli({"gen", "--vars", "4", "--depth", "6", "--coeff-min", "-3", "--coeff-max", "3", "--quant-prob", "1/3",
                  "--seed", "17"});
    ASSERT_EQ(r.code, 0);
    GenParams p;
    p.num_vars = 4;
    p.depth = 6;
    p.coeff_min = -3;
    p.coeff_max = 3;
    p.quantifier_prob = Rational(1, 3);
    p.seed = 17;
    EXPECT_EQ(r.out, print(gen_random(p)) + "\n");
}

TEST(Bench, EmptySuite) {
    BenchConfig c = parse_bench_config("algorithms=main,lw\n");
    auto records = bench_run(bench_instances(c), c);
    EXPECT_TRUE(records.empty());
    std::ostringstream os;
    write_csv(os, records);
    EXPECT_EQ(os.str(), "instance,algorithm,outcome,wall_ms,iterations,smt_calls,output_atoms\n");
}

TEST(Bench, ConfigErrors) {
    EXPECT_THROW(parse_bench_config("algorithms=main,fm"), std::invalid_argument);
    EXPECT_THROW(parse_bench_config("depth"), std::invalid_argument);
    EXPECT_THROW(parse_bench_config("colour=blue"), std::invalid_argument);
    EXPECT_THROW(parse_bench_config("coeff_min=5\ncoeff_max=1"), std::invalid_argument);
}

TEST(Bench, SingleInstanceMatchesCli) {
    TempDir d;
    auto f = d.write("one.qel", "(exists (x) (or (and (>= x y) (<= x 1)) (= x (* 2 y))))");
    BenchConfig c = parse_bench_config("algorithms=main,lw\nfiles=" + f + "\n");
    auto records = bench_run(bench_instances(c), c);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].outcome, Outcome::Solved);
    EXPECT_EQ(records[0].instance, f);
    EXPECT_TRUE(equiv_check(*records[0].output, *records[1].output));
    EXPECT_EQ(print(*records[0].output) + "\n", cli({"eliminate", f}).out);
}

TEST(Bench, RecordsOrderedAndThreadIndependent) {
    std::string cfg = "algorithms=main,mod1,mod2,lw\nvars=3\ndepth=6\nseed_begin=5\ncount=6\n";
    BenchConfig one = parse_bench_config(cfg + "threads=1\n");
    BenchConfig four = parse_bench_config(cfg + "threads=4\n");
    auto a = bench_run(bench_instances(one), one);
    auto b = bench_run(bench_instances(four), four);
    ASSERT_EQ(a.size(), 24u);
    ASSERT_EQ(b.size(), 24u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].instance, b[i].instance);
        EXPECT_EQ(a[i].algorithm, b[i].algorithm);
        EXPECT_EQ(print(*a[i].output), print(*b[i].output));
    }
    EXPECT_EQ(a[0].instance, "seed5");
    EXPECT_EQ(a[3].algorithm, "lw");
    auto sum = summarize(a, one.algorithms);
    ASSERT_EQ(sum.size(), 4u);
    for (const auto& s : sum) EXPECT_EQ(s.solved + s.timeouts + s.out_of_memory, 6u);
}

TEST(Bench, LimitsAreRecordedOutcomes) {
    BenchConfig c = parse_bench_config("algorithms=main,lw\nvars=7\ndepth=16\nseed_begin=2\ncount=1\ntimeout_ms=0\n");
    auto records = bench_run(bench_instances(c), c);
    ASSERT_EQ(records.size(), 2u);
    for (const auto& r : records) EXPECT_EQ(r.outcome, Outcome::Timeout);
    BenchConfig m = parse_bench_config("algorithms=lw\nvars=7\ndepth=16\nseed_begin=2\ncount=1\nmemory_mb=0\n");
    EXPECT_EQ(bench_run(bench_instances(m), m)[0].outcome, Outcome::OutOfMemoryEst);
}

TEST(Bench, CliWritesCsv) {
    TempDir d;
    auto cfg = d.write("b.cfg", "# tiny\nalgorithms=main,lw\nvars=2\ndepth=4\ncount=3\n");
    auto csv = d.path("out.csv");
    auto r = cli({"bench", cfg, "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Solved"), std::string::npos);
    std::ifstream in(csv);
    std::string line;
    int n = 0;
    std::getline(in, line);
    EXPECT_EQ(line, kCsvHeader);
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 6);
}
