#include "sfj/config.hpp"

#include <limits>

#include "sfj/errors.hpp"

namespace sfj {

int RuntimeConfig::num_workers() const {
    if (granularity == Granularity::block_level) return grid_size;
    return static_cast<int>(static_cast<std::int64_t>(grid_size) * block_size / warp_size);
}

std::int64_t RuntimeConfig::parallel_lanes() const {
    if (granularity == Granularity::block_level) return grid_size;
    return static_cast<std::int64_t>(num_workers()) * warp_size;
}

int RuntimeConfig::queue_capacity() const {
    return granularity == Granularity::block_level ? max_tasks_per_block : max_tasks_per_warp;
}

int RuntimeConfig::queues_per_worker() const {
    return granularity == Granularity::block_level ? 1 : num_queues;
}

std::uint64_t RuntimeConfig::pool_capacity() const {
    return static_cast<std::uint64_t>(num_workers()) *
           static_cast<std::uint64_t>(queue_capacity());
}

void RuntimeConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid runtime config: ") + what);
    };
    require(grid_size > 0, "grid_size must be > 0");
    require(block_size > 0, "block_size must be > 0");
    require(warp_size >= 1, "warp_size must be >= 1");
    require(block_size % warp_size == 0, "block_size must be a multiple of warp_size");
    require(max_tasks_per_warp > 0, "max_tasks_per_warp must be > 0");
    require(max_tasks_per_block > 0, "max_tasks_per_block must be > 0");
    require(max_child_tasks > 0, "max_child_tasks must be > 0");
    require(num_queues >= 1, "num_queues must be >= 1");
    require(max_task_data_size > 0, "max_task_data_size must be > 0");
    require(steal_attempts >= 0, "steal_attempts must be >= 0");
    require(max_threads >= 0, "max_threads must be >= 0");
    require(granularity == Granularity::thread_level || num_queues == 1,
            "block-level workers support exactly one queue");
    // TaskId.index is 32 bits wide; the top value is reserved as "none".
    require(pool_capacity() < std::numeric_limits<std::uint32_t>::max(),
            "pool capacity overflows the task handle width");
}

std::string_view to_string(Granularity g) {
    return g == Granularity::thread_level ? "thread" : "block";
}
std::string_view to_string(SchedulerKind s) {
    return s == SchedulerKind::work_stealing ? "ws" : "gq";
}
std::string_view to_string(QueueAlg q) {
    return q == QueueAlg::batched ? "batched" : "seq-cl";
}
std::string_view to_string(EngineKind e) {
    return e == EngineKind::concurrent ? "concurrent" : "det";
}

Granularity parse_granularity(std::string_view s) {
    if (s == "thread") return Granularity::thread_level;
    if (s == "block") return Granularity::block_level;
    throw ConfigError("unknown granularity: " + std::string(s));
}
SchedulerKind parse_scheduler(std::string_view s) {
    if (s == "ws") return SchedulerKind::work_stealing;
    if (s == "gq") return SchedulerKind::global_queue;
    throw ConfigError("unknown scheduler: " + std::string(s));
}
QueueAlg parse_queue_alg(std::string_view s) {
    if (s == "batched") return QueueAlg::batched;
    if (s == "seq-cl") return QueueAlg::sequential_chase_lev;
    throw ConfigError("unknown queue algorithm: " + std::string(s));
}
EngineKind parse_engine(std::string_view s) {
    if (s == "concurrent") return EngineKind::concurrent;
    if (s == "det") return EngineKind::deterministic;
    throw ConfigError("unknown engine: " + std::string(s));
}

}  // namespace sfj
