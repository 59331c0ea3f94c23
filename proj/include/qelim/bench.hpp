#pragma once

#include "qelim/budget.hpp"
#include "qelim/generator.hpp"
#include "qelim/io.hpp"
#include "qelim/lw.hpp"
#include "qelim/qe.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qelim {

inline const std::vector<std::string>& known_algorithms() {
    static const std::vector<std::string> names{"main", "mod1", "mod2", "lw"};
    return names;
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "main") return Algorithm::Main;
    if (name == "mod1") return Algorithm::Mod1;
    if (name == "mod2") return Algorithm::Mod2;
    return std::nullopt;
}

// Number of atom occurrences in a formula.
inline std::size_t atom_occurrences(const Formula& f) {
    if (f.is_atom()) return 1;
    std::size_t n = 0;
    for (const auto& c : f.children()) n += atom_occurrences(c);
    return n;
}

// Runs one of main / mod1 / mod2 / lw on an arbitrary formula.
inline QeOutput run_algorithm(std::string_view name, const Formula& f, ElimOptions opt = {}) {
    if (name == "lw") {
        if (opt.assumption) throw std::invalid_argument("the lw algorithm does not support assumptions");
        auto t0 = std::chrono::steady_clock::now();
        QeOutput out{lw_eliminate_all(f), {}};
        out.stats.total_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }
    auto alg = parse_algorithm(name);
    if (!alg) throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
    opt.algorithm = *alg;
    return eliminate_all(f, opt);
}

enum class Outcome { Solved, Timeout, OutOfMemoryEst };

inline const char* outcome_name(Outcome o) {
    switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Timeout: return "timeout";
    case Outcome::OutOfMemoryEst: return "out-of-memory-est";
    }
    return "?";
}

struct BenchRecord {
    std::string instance;
    std::string algorithm;
    Outcome outcome = Outcome::Solved;
    double wall_ms = 0;
    ElimStats stats;
    std::size_t output_atoms = 0;
    std::optional<Formula> output;
};

struct BenchInstance {
    std::string id;
    Formula formula;
};

// key=value lines, '#' comments. Keys: algorithms (comma list), vars, depth,
// coeff_min, coeff_max, quant_prob, seed_begin, count, files (comma list of
// .qel paths), timeout_ms, memory_mb, threads, out.
struct BenchConfig {
    std::vector<std::string> algorithms{"main", "mod1", "mod2", "lw"};
    std::optional<GenParams> gen;
    std::uint64_t seed_begin = 0;
    std::uint64_t count = 0;
    std::vector<std::string> files;
    std::chrono::milliseconds timeout{300000};
    std::size_t memory_bytes = std::size_t{1843} << 20; // 1.8 GiB
    unsigned threads = 1;
    std::string out;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

inline std::string trim(std::string s) {
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && ws(s[i])) ++i;
    return s.substr(i);
}

} // namespace detail

inline BenchConfig parse_bench_config(std::string_view text) {
    BenchConfig c;
    std::stringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto gen = [&]() -> GenParams& {
        if (!c.gen) c.gen = GenParams{};
        return *c.gen;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (key == "algorithms") {
                c.algorithms = detail::split_list(val);
                for (const auto& a : c.algorithms)
                    if (std::find(known_algorithms().begin(), known_algorithms().end(), a) == known_algorithms().end())
                        throw std::invalid_argument("unknown algorithm '" + a + "'");
            } else if (key == "vars") gen().num_vars = std::stoi(val);
            else if (key == "depth") gen().depth = std::stoi(val);
            else if (key == "coeff_min") gen().coeff_min = std::stoll(val);
            else if (key == "coeff_max") gen().coeff_max = std::stoll(val);
            else if (key == "quant_prob") gen().quantifier_prob = parse_rational(val);
            else if (key == "seed_begin") c.seed_begin = std::stoull(val);
            else if (key == "count") c.count = std::stoull(val);
            else if (key == "files") c.files = detail::split_list(val);
            else if (key == "timeout_ms") c.timeout = std::chrono::milliseconds(std::stoll(val));
            else if (key == "memory_mb") c.memory_bytes = std::stoull(val) << 20;
            else if (key == "threads") c.threads = static_cast<unsigned>(std::max(1, std::stoi(val)));
            else if (key == "out") c.out = val;
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": value out of range");
        }
    }
    if (c.gen) c.gen->validate();
    return c;
}

inline std::vector<BenchInstance> bench_instances(const BenchConfig& c) {
    std::vector<BenchInstance> out;
    for (const auto& path : c.files) out.push_back({path, parse_file(path)});
    if (c.gen) {
        for (std::uint64_t i = 0; i < c.count; ++i) {
            GenParams p = *c.gen;
            p.seed = c.seed_begin + i;
            out.push_back({"seed" + std::to_string(p.seed), gen_random(p)});
        }
    }
    return out;
}

inline BenchRecord run_one(const BenchInstance& inst, const std::string& alg, const BenchConfig& c,
                           const ElimOptions& opt = {}) {
    BenchRecord r;
    r.instance = inst.id;
    r.algorithm = alg;
    auto t0 = std::chrono::steady_clock::now();
    try {
        Budget::Scope scope(Budget::with_timeout(c.timeout, c.memory_bytes));
        QeOutput out = run_algorithm(alg, inst.formula, opt);
        r.stats = out.stats;
        r.output_atoms = atom_occurrences(out.formula);
        r.output = std::move(out.formula);
    } catch (const ResourceLimit& e) {
        r.outcome = e.kind() == ResourceLimit::Kind::Timeout ? Outcome::Timeout : Outcome::OutOfMemoryEst;
    } catch (const std::bad_alloc&) {
        r.outcome = Outcome::OutOfMemoryEst;
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// One record per (instance, algorithm), ordered by instance then by the
// configured algorithm order regardless of how work was scheduled.
inline std::vector<BenchRecord> bench_run(const std::vector<BenchInstance>& instances, const BenchConfig& c) {
    const std::size_t n = instances.size() * c.algorithms.size();
    std::vector<BenchRecord> records(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            const auto& inst = instances[k / c.algorithms.size()];
            records[k] = run_one(inst, c.algorithms[k % c.algorithms.size()], c);
        }
    };
    unsigned threads = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

inline constexpr const char* kCsvHeader = "instance,algorithm,outcome,wall_ms,iterations,smt_calls,output_atoms";

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.instance << ',' << r.algorithm << ',' << outcome_name(r.outcome) << ',' << std::fixed
           << std::setprecision(3) << r.wall_ms << ',' << r.stats.iterations << ',' << r.stats.smt_calls << ','
           << r.output_atoms << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

struct BenchSummary {
    std::string algorithm;
    std::size_t solved = 0;
    double avg_ms = 0;
    std::size_t out_of_memory = 0;
    std::size_t timeouts = 0;
};

inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records,
                                           const std::vector<std::string>& algorithms) {
    std::vector<BenchSummary> out;
    for (const auto& a : algorithms) {
        BenchSummary s{a};
        double total = 0;
        for (const auto& r : records) {
            if (r.algorithm != a) continue;
            switch (r.outcome) {
            case Outcome::Solved:
                ++s.solved;
                total += r.wall_ms;
                break;
            case Outcome::Timeout: ++s.timeouts; break;
            case Outcome::OutOfMemoryEst: ++s.out_of_memory; break;
            }
        }
        s.avg_ms = s.solved ? total / static_cast<double>(s.solved) : 0;
        out.push_back(s);
    }
    return out;
}

inline void print_summary(std::ostream& os, const std::vector<BenchSummary>& rows) {
    os << std::left << std::setw(10) << "algorithm" << std::right << std::setw(8) << "Solved" << std::setw(12)
       << "Avg (s)" << std::setw(8) << "O-o-m" << std::setw(10) << "Timeout" << '\n';
    for (const auto& r : rows) {
        os << std::left << std::setw(10) << r.algorithm << std::right << std::setw(8) << r.solved << std::setw(12)
           << std::fixed << std::setprecision(3) << r.avg_ms / 1000.0 << std::setw(8) << r.out_of_memory
           << std::setw(10) << r.timeouts << '\n';
    }
    os.unsetf(std::ios::floatfield);
}

} // namespace qelim
