#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sfj {

using Value = std::int64_t;
using WorkerId = int;
using FnId = int;

enum class Granularity { thread_level, block_level };
enum class SchedulerKind { work_stealing, global_queue };
enum class QueueAlg { batched, sequential_chase_lev };
enum class EngineKind { concurrent, deterministic };

/// Compile-time knobs of the runtime plus engine and topology selection.
struct RuntimeConfig {
    int grid_size = 1;
    int block_size = 32;
    int warp_size = 32;
    int max_tasks_per_warp = 4096;
    int max_tasks_per_block = 4096;
    int max_child_tasks = 16;
    int num_queues = 1;
    int max_task_data_size = 128;  // bytes
    bool assume_no_taskwait = false;

    Granularity granularity = Granularity::thread_level;
    SchedulerKind scheduler = SchedulerKind::work_stealing;
    QueueAlg queue_alg = QueueAlg::batched;
    EngineKind engine = EngineKind::deterministic;
    std::uint64_t seed = 1;

    bool epaq_pure_keep = false;
    bool steal_half = false;
    int steal_attempts = 4;
    /// Concurrent engine only: workers are multiplexed onto at most this many threads.
    int max_threads = 0;  // 0 = one thread per worker
    /// Keep the per-invocation log (needed for work/span and ordering checks).
    bool record_invocations = true;
    /// Count join-metadata writes and per-slot lifecycle events.
    bool instrument = false;
    /// Fault injection for liveness tests: continuations made runnable are discarded.
    bool debug_drop_resumes = false;

    /// Number of persistent workers: warps for thread-level, blocks for block-level.
    int num_workers() const;
    /// Lanes that can run task invocations simultaneously (the P of T1/P).
    std::int64_t parallel_lanes() const;
    int queue_capacity() const;
    int queues_per_worker() const;
    std::uint64_t pool_capacity() const;

    /// Throws ConfigError on any violated capacity or topology invariant.
    void validate() const;
};

std::string_view to_string(Granularity g);
std::string_view to_string(SchedulerKind s);
std::string_view to_string(QueueAlg q);
std::string_view to_string(EngineKind e);

Granularity parse_granularity(std::string_view s);
SchedulerKind parse_scheduler(std::string_view s);
QueueAlg parse_queue_alg(std::string_view s);
EngineKind parse_engine(std::string_view s);

}  // namespace sfj
