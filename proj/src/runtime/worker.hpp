#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "queue_system.hpp"
#include "sfj/metrics.hpp"
#include "sfj/rng.hpp"
#include "sfj/runtime.hpp"
#include "sfj/task_core.hpp"
#include "sfj/taskc/interp.hpp"

namespace sfj::detail {

/// A task handle plus the queue class it belongs to.
struct Item {
    TaskId id;
    int queue = 0;
};

/// State every worker of one run shares.
struct Shared {
    Shared(const TaskRegistry& reg, const RuntimeConfig& cfg, BufferStore& buf);

    const TaskRegistry& registry;
    const RuntimeConfig& config;
    BufferStore& buffers;
    TaskPool pool;
    QueueSystem queues;
    /// Parent state at the moment each slot's current task was spawned.
    std::vector<int> spawn_state;
    std::atomic<std::uint64_t> seq{0};
    int batch_limit;
    int lanes;
    bool keep;
};

struct WorkerState {
    WorkerState(Shared& s, WorkerId id);

    WorkerId id;
    Rng rng;
    int last_queue = 0;
    std::vector<Item> kept;
    std::vector<Item> pending;        // outputs of the last batch, priority order
    std::vector<Item> batch;
    QueueCounters counters;
    DivergenceStats divergence;
    std::vector<InvocationRecord> log;
    std::unique_ptr<taskc::IrInterpreter> interp;
    std::int64_t backoff = 1;

    // Scratch reused across cycles.
    std::vector<TaskId> ids;
    std::vector<Item> resumes;
    std::vector<Item> spawns;
    std::vector<PathSignature> sigs;
    std::vector<std::uint64_t> costs;
};

/// Engine-specific timing around queue operations and batch execution.
class Clock {
public:
    virtual ~Clock() = default;
    /// Called after an operation on `structure` that performed `units` of
    /// synchronization work.
    virtual void queue_op(int structure, std::uint64_t units) = 0;
    virtual std::int64_t now() = 0;
};

/// Hands the last batch's outputs out: up to a batch worth is kept for the next
/// cycle, the rest is pushed to the queues named by each item.
void distribute(Shared& s, WorkerState& w, Clock& clock);

/// Fills `w.batch` from the kept set, the local queues and, when empty, by stealing.
void acquire(Shared& s, WorkerState& w, Clock& clock);

/// Runs every task of `w.batch` once and collects the outputs into `w.pending`.
/// Returns the modeled cost of the batch. Log entries get `t_start`; their end is
/// set by `close_log` once the engine knows it.
std::uint64_t execute(Shared& s, WorkerState& w, std::int64_t t_start);

/// Stamps the end time onto the log entries the last `execute` appended.
void close_log(WorkerState& w, std::size_t from, std::int64_t t_end);

}  // namespace sfj::detail
