#include <algorithm>
#include <chrono>

#include "engines.hpp"
#include "sfj/errors.hpp"

namespace sfj {

namespace {

void check_program(const TaskRegistry& reg, const RuntimeConfig& config, BufferStore& buffers) {
    const taskc::IrProgram* prog = reg.program();
    if (!prog) return;
    for (const auto& f : prog->functions) {
        if (f.is_task && static_cast<int>(f.layout.size_bytes()) > config.max_task_data_size) {
            throw ConfigError("task '" + f.name + "' needs " +
                              std::to_string(f.layout.size_bytes()) +
                              " bytes of task data, max_task_data_size is " +
                              std::to_string(config.max_task_data_size));
        }
    }
    for (const auto& b : prog->buffers) {
        if (buffers.find(b) < 0) throw UsageError("buffer '" + b + "' was not provided");
    }
}

DivergenceStats merge(const std::vector<detail::WorkerState>& workers, int width) {
    DivergenceStats d;
    for (const auto& w : workers) {
        d.batches += w.divergence.batches;
        d.tasks += w.divergence.tasks;
        d.distinct_paths += w.divergence.distinct_paths;
        for (const auto& [k, v] : w.divergence.histogram) d.histogram[k] += v;
    }
    d.finalize(width);
    return d;
}

}  // namespace

RunReport run(const TaskRegistry& registry, const SpawnRequest& root, const RuntimeConfig& config,
              BufferStore& buffers) {
    config.validate();
    check_program(registry, config, buffers);
    if (root.fn < 0 || root.fn >= registry.size() || !registry.is_task(root.fn)) {
        throw UsageError("root function " + std::to_string(root.fn) + " is not a task");
    }
    if (root.queue_index < 0 || root.queue_index >= config.queues_per_worker()) {
        throw UsageError("root queue index " + std::to_string(root.queue_index) +
                         " outside [0, " + std::to_string(config.queues_per_worker()) + ")");
    }

    const auto wall0 = std::chrono::steady_clock::now();
    detail::Shared shared(registry, config, buffers);
    std::vector<detail::WorkerState> workers;
    workers.reserve(static_cast<std::size_t>(config.num_workers()));
    for (WorkerId w = 0; w < config.num_workers(); ++w) workers.emplace_back(shared, w);

    const TaskId root_id = shared.pool.alloc(0, root.fn, root.args);
    shared.queues.push(0, root.queue_index, std::span<const TaskId>(&root_id, 1),
                       workers[0].counters);

    detail::EngineResult er = config.engine == EngineKind::deterministic
                                  ? detail::run_deterministic(shared, workers)
                                  : detail::run_concurrent(shared, workers);

    RunReport r;
    r.config = config;
    r.root_finished = shared.pool.root_finished();
    r.root_result = shared.pool.root_result();
    r.makespan = er.makespan;
    r.timeline = std::move(er.timeline);
    r.divergence = merge(workers, shared.batch_limit);
    for (auto& w : workers) {
        r.queues += w.counters;
        r.invocation_count += w.divergence.tasks;
        r.invocations.insert(r.invocations.end(), w.log.begin(), w.log.end());
    }
    std::sort(r.invocations.begin(), r.invocations.end(),
              [](const InvocationRecord& a, const InvocationRecord& b) { return a.seq < b.seq; });
    r.tasks_allocated = shared.pool.total_allocs();
    r.tasks_finished = shared.pool.total_finishes();
    r.outstanding_at_exit = shared.pool.outstanding();
    if (config.record_invocations) r.work_span = compute_work_span(r.invocations);
    r.work_span.makespan = r.makespan;
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return r;
}

}  // namespace sfj
