#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfj/config.hpp"
#include "sfj/queues/counters.hpp"

namespace sfj {

/// Identifies the control-flow path one invocation took. Equal signatures mean the
/// lanes ran the same code in lockstep. `queue_index` (the queue the task came
/// from) is reported but not part of equality.
struct PathSignature {
    FnId fn = 0;
    int entry_state = 0;
    std::uint64_t path_tag = 0;
    int queue_index = 0;

    bool same_path(const PathSignature& o) const {
        return fn == o.fn && entry_state == o.entry_state && path_tag == o.path_tag;
    }
};

struct TimelineSegment {
    enum class Kind { task_exec, idle };
    WorkerId worker = 0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    Kind kind = Kind::idle;
    int active_lanes = 0;
};

struct DivergenceStats {
    std::uint64_t batches = 0;
    std::uint64_t tasks = 0;
    std::uint64_t distinct_paths = 0;  // summed over batches
    std::map<int, std::uint64_t> histogram;  // distinct paths per batch -> batches
    double mean_distinct_paths = 0;
    double lane_utilization = 0;

    void add_batch(int size, int distinct);
    void finalize(int warp_size);
};

/// Invocation log entry: one dispatch of one task state.
struct InvocationRecord {
    std::uint64_t task = 0;        // TaskId key (index and generation)
    FnId fn = 0;
    int state = 0;
    std::uint64_t cost = 0;        // modeled cost of this invocation
    std::uint64_t parent = 0;      // parent's key, valid when has_parent
    bool has_parent = false;
    int parent_state = 0;          // parent state during which this task was spawned
    WorkerId worker = 0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    std::uint64_t seq = 0;         // global dispatch order
};

struct WorkSpan {
    std::int64_t total_work = 0;
    std::int64_t critical_path = 0;
    std::int64_t makespan = 0;
};

/// SIMT serialization: distinct paths run one after another, each taking as long as
/// its slowest lane.
std::uint64_t batch_cost(std::span<const PathSignature> sigs, std::span<const std::uint64_t> costs);
int distinct_paths(std::span<const PathSignature> sigs);

/// T1 = sum of costs; T_inf = longest cost-weighted path where a task's first state
/// follows the parent state that spawned it, each state follows the previous one,
/// and a continuation follows the last invocation of every child of its epoch.
/// Throws InternalError on a cyclic or incomplete log.
WorkSpan compute_work_span(std::span<const InvocationRecord> log);

/// Per-worker timeline builder.
class TimelineRecorder {
public:
    explicit TimelineRecorder(int workers) : per_worker_(workers) {}

    void task_exec(WorkerId w, std::int64_t t0, std::int64_t t1, int lanes);
    void idle(WorkerId w, std::int64_t t0, std::int64_t t1);
    /// Pads each worker with idle time up to `makespan` and cuts anything after it.
    std::vector<TimelineSegment> finish(std::int64_t makespan,
                                        std::int64_t origin = 0) const;

private:
    std::vector<std::vector<TimelineSegment>> per_worker_;
};

struct RunReport {
    RuntimeConfig config;
    Value root_result = 0;
    bool root_finished = false;
    std::int64_t makespan = 0;  // modeled units (deterministic) or nanoseconds (concurrent)
    double wall_seconds = 0;
    std::vector<TimelineSegment> timeline;
    DivergenceStats divergence;
    WorkSpan work_span;
    QueueCounters queues;
    std::vector<InvocationRecord> invocations;
    std::uint64_t tasks_allocated = 0;
    std::uint64_t tasks_finished = 0;
    std::uint64_t invocation_count = 0;
    std::int64_t outstanding_at_exit = 0;
    std::vector<std::pair<std::string, std::string>> extra;  // caller-supplied echo
};

enum class ReportFormat { csv, json };

std::string report_json(const RunReport& r);
std::string report_csv(const RunReport& r);
/// Throws Error naming the path on I/O failure.
void export_report(const RunReport& r, const std::string& path, ReportFormat format);

std::string config_json(const RuntimeConfig& c);

}  // namespace sfj
