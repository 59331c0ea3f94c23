#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qelim {

class ResourceLimit : public std::runtime_error {
public:
    enum class Kind { Timeout, Memory };
    ResourceLimit(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Cooperative per-thread resource limits. Long-running loops call
// Budget::poll(); module boundaries report an estimate of their live data
// through Budget::note_memory(). Both throw ResourceLimit once exceeded.
class Budget {
public:
    using Clock = std::chrono::steady_clock;

    struct Limits {
        std::optional<Clock::time_point> deadline;
        std::optional<std::size_t> memory_bytes;
    };

    // Installs limits for the current thread for the lifetime of the scope.
    class Scope {
    public:
        explicit Scope(Limits limits) : saved_(current()) { current() = limits; }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;
        ~Scope() { current() = saved_; }

    private:
        Limits saved_;
    };

    static Limits with_timeout(std::chrono::milliseconds ms, std::optional<std::size_t> memory = {}) {
        return Limits{Clock::now() + ms, memory};
    }

    static void poll() {
        const auto& l = current();
        if (l.deadline && Clock::now() >= *l.deadline)
            throw ResourceLimit(ResourceLimit::Kind::Timeout, "time limit exceeded");
    }

    static void note_memory(std::size_t bytes) {
        const auto& l = current();
        if (l.memory_bytes && bytes > *l.memory_bytes)
            throw ResourceLimit(ResourceLimit::Kind::Memory, "memory estimate exceeds limit");
    }

private:
    static Limits& current() {
        thread_local Limits limits;
        return limits;
    }
};

// Rough per-node footprint used by memory estimates.
inline constexpr std::size_t kFormulaNodeBytes = 160;
inline constexpr std::size_t kAtomBytes = 96;

} // namespace qelim
