#pragma once

#include <vector>

#include "worker.hpp"

namespace sfj::detail {

struct EngineResult {
    std::int64_t makespan = 0;
    std::vector<TimelineSegment> timeline;
};

/// Single-threaded discrete-event simulation in modeled time units.
EngineResult run_deterministic(Shared& s, std::vector<WorkerState>& workers);

/// Real threads; times in nanoseconds since start.
EngineResult run_concurrent(Shared& s, std::vector<WorkerState>& workers);

}  // namespace sfj::detail
