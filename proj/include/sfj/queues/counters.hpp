#pragma once

#include <cstdint>

namespace sfj {

/// Per-worker instrumentation of queue traffic. Plain integers: each worker owns one.
struct QueueCounters {
    std::uint64_t push_ops = 0;
    std::uint64_t pushed_tasks = 0;
    std::uint64_t pop_attempts = 0;
    std::uint64_t popped_tasks = 0;
    std::uint64_t steal_attempts = 0;
    std::uint64_t stolen_tasks = 0;
    std::uint64_t failed_steals = 0;
    /// Successful claim operations: count CAS (batched) or one element (Chase-Lev).
    std::uint64_t claims = 0;
    std::uint64_t cas_failures = 0;
    std::uint64_t lock_acquisitions = 0;
    std::uint64_t lock_failures = 0;

    std::uint64_t acquired_tasks() const { return popped_tasks + stolen_tasks; }
    std::uint64_t sync_ops() const { return claims + lock_acquisitions; }

    QueueCounters& operator+=(const QueueCounters& o) {
        push_ops += o.push_ops;
        pushed_tasks += o.pushed_tasks;
        pop_attempts += o.pop_attempts;
        popped_tasks += o.popped_tasks;
        steal_attempts += o.steal_attempts;
        stolen_tasks += o.stolen_tasks;
        failed_steals += o.failed_steals;
        claims += o.claims;
        cas_failures += o.cas_failures;
        lock_acquisitions += o.lock_acquisitions;
        lock_failures += o.lock_failures;
        return *this;
    }
};

}  // namespace sfj
