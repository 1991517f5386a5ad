#include "worker.hpp"

#include <algorithm>

#include "sfj/errors.hpp"

namespace sfj::detail {

namespace {

std::vector<int> arities(const TaskRegistry& reg) {
    std::vector<int> a;
    for (FnId f = 0; f < reg.size(); ++f) a.push_back(reg.arity(f));
    return a;
}

/// The view one invocation gets; doubles as the compiled-code environment.
class Context final : public InvocationContext, public taskc::ExecEnv {
public:
    Context(Shared& s, WorkerState& w, TaskId self, int state)
        : s_(s), w_(w), self_(self), state_(state) {}

    TaskId self() const override { return self_; }
    int state() const override { return state_; }
    WorkerId worker() const override { return w_.id; }
    std::span<Value> data() override { return s_.pool.data(self_); }
    std::span<Value> task_data() override { return s_.pool.data(self_); }
    Value load_result(int ordinal) override { return s_.pool.load_result(self_, ordinal); }
    int lane_count() const override { return s_.lanes; }
    void add_cost(std::uint64_t units) override { cost_ += units; }
    void set_path_tag(std::uint64_t tag) override { tag_ = tag; }
    BufferStore& buffers() override { return s_.buffers; }

    int spawn(FnId fn, std::span<const Value> args, int queue) override {
        if (fn < 0 || fn >= s_.registry.size() || !s_.registry.is_task(fn)) {
            throw UsageError("spawn: function " + std::to_string(fn) + " is not a task");
        }
        if (queue < 0 || queue >= s_.queues.queues()) {
            throw UsageError("spawn: queue index " + std::to_string(queue) +
                             " outside [0, " + std::to_string(s_.queues.queues()) + ")");
        }
        int ord = 0;
        if (!s_.config.assume_no_taskwait) ord = s_.pool.register_child(self_);
        const TaskId child = s_.pool.alloc(w_.id, fn, args, self_, ord);
        s_.spawn_state[child.index] = state_;
        w_.spawns.push_back({child, queue});
        return ord;
    }

    void spawn(FnId fn, std::span<const Value> args, Value queue, int ordinal) override {
        if (queue < 0 || queue >= s_.queues.queues()) {
            throw UsageError("spawn: queue index " + std::to_string(queue) +
                             " outside [0, " + std::to_string(s_.queues.queues()) + ")");
        }
        const int got = spawn(fn, args, static_cast<int>(queue));
        if (ordinal >= 0 && !s_.config.assume_no_taskwait && got != ordinal) {
            throw InternalError("spawn: static ordinal " + std::to_string(ordinal) +
                                " but runtime ordinal " + std::to_string(got));
        }
    }

    std::uint64_t cost() const { return cost_; }
    std::uint64_t tag() const { return tag_; }

private:
    Shared& s_;
    WorkerState& w_;
    TaskId self_;
    int state_;
    std::uint64_t cost_ = 0;
    std::uint64_t tag_ = 0;
};

void check_queue(int q, int queues, const char* what) {
    if (q < 0 || q >= queues) {
        throw UsageError(std::string(what) + ": queue index " + std::to_string(q) +
                         " outside [0, " + std::to_string(queues) + ")");
    }
}

}  // namespace

Shared::Shared(const TaskRegistry& reg, const RuntimeConfig& cfg, BufferStore& buf)
    : registry(reg),
      config(cfg),
      buffers(buf),
      pool(cfg, arities(reg)),
      queues(cfg),
      spawn_state(pool.capacity(), 0),
      batch_limit(cfg.granularity == Granularity::block_level ? 1 : cfg.warp_size),
      lanes(cfg.granularity == Granularity::block_level ? cfg.block_size : 1),
      keep(cfg.granularity == Granularity::thread_level) {}

WorkerState::WorkerState(Shared& s, WorkerId wid) : id(wid), rng(s.config.seed, wid) {
    if (s.registry.program()) {
        interp = std::make_unique<taskc::IrInterpreter>(*s.registry.program(), s.buffers);
    }
}

void distribute(Shared& s, WorkerState& w, Clock& clock) {
    if (w.pending.empty()) return;
    const auto limit = static_cast<std::size_t>(s.batch_limit);
    std::vector<Item> rest;
    if (!s.keep) {
        rest = std::move(w.pending);
    } else if (s.config.epaq_pure_keep) {
        // Keep only the most numerous queue class; ties go to the earliest in priority.
        std::vector<int> count(static_cast<std::size_t>(s.queues.queues()), 0);
        for (const Item& it : w.pending) ++count[it.queue];
        int cls = w.pending.front().queue;
        for (const Item& it : w.pending) {
            if (count[it.queue] > count[cls]) cls = it.queue;
        }
        for (const Item& it : w.pending) {
            if (it.queue == cls && w.kept.size() < limit) {
                w.kept.push_back(it);
            } else {
                rest.push_back(it);
            }
        }
    } else {
        const std::size_t k = std::min(limit, w.pending.size());
        w.kept.assign(w.pending.begin(), w.pending.begin() + static_cast<std::ptrdiff_t>(k));
        rest.assign(w.pending.begin() + static_cast<std::ptrdiff_t>(k), w.pending.end());
    }
    w.pending.clear();
    if (rest.empty()) return;
    // Oldest first, so the most recent output ends up at the owner's end.
    std::reverse(rest.begin(), rest.end());
    for (int q = 0; q < s.queues.queues(); ++q) {
        w.ids.clear();
        for (const Item& it : rest) {
            if (it.queue == q) w.ids.push_back(it.id);
        }
        if (w.ids.empty()) continue;
        if (s.keep) {
            const QueueCounters before = w.counters;
            s.queues.push(w.id, q, w.ids, w.counters);
            clock.queue_op(s.queues.structure(w.id, q),
                           (w.counters.sync_ops() - before.sync_ops()) +
                               (w.counters.push_ops - before.push_ops));
        } else {
            for (TaskId id : w.ids) {
                const QueueCounters before = w.counters;
                s.queues.push(w.id, q, std::span<const TaskId>(&id, 1), w.counters);
                clock.queue_op(s.queues.structure(w.id, q),
                               (w.counters.sync_ops() - before.sync_ops()) +
                                   (w.counters.push_ops - before.push_ops));
            }
        }
    }
}

namespace {

std::size_t timed_pop(Shared& s, WorkerState& w, int q, std::size_t max, Clock& clock) {
    const QueueCounters before = w.counters;
    w.ids.clear();
    const std::size_t n = s.queues.pop(w.id, q, max, w.ids, w.counters);
    clock.queue_op(s.queues.structure(w.id, q), w.counters.sync_ops() - before.sync_ops());
    for (TaskId id : w.ids) w.batch.push_back({id, q});
    return n;
}

}  // namespace

void acquire(Shared& s, WorkerState& w, Clock& clock) {
    w.batch.clear();
    w.batch.swap(w.kept);
    const auto limit = static_cast<std::size_t>(s.batch_limit);
    const int nq = s.queues.queues();
    if (w.batch.size() < limit) {
        int q;
        if (s.config.epaq_pure_keep && !w.batch.empty()) {
            q = w.batch.front().queue;
        } else {
            q = select_queue_epaq(w.last_queue, nq,
                                  [&](int i) { return s.queues.available(w.id, i) > 0; });
        }
        if (timed_pop(s, w, q, limit - w.batch.size(), clock) > 0) w.last_queue = q;
    }
    if (!w.batch.empty() || !s.queues.can_steal()) return;
    const int workers = s.config.num_workers();
    for (int attempt = 0; attempt < s.config.steal_attempts; ++attempt) {
        auto victim = select_victim(w.id, workers, w.rng);
        if (!victim) return;
        // Probe the victim's queues starting at our own last-used index.
        const int q = select_queue_epaq(w.last_queue, nq, [&](int i) {
            return s.queues.available(*victim, i) > 0;
        });
        const std::int64_t avail = s.queues.available(*victim, q);
        if (avail <= 0) {
            ++w.counters.steal_attempts;
            ++w.counters.failed_steals;
            continue;
        }
        std::size_t max = limit;
        if (s.config.steal_half) {
            max = std::min<std::size_t>(max, static_cast<std::size_t>((avail + 1) / 2));
        }
        const QueueCounters before = w.counters;
        w.ids.clear();
        const std::size_t n = s.queues.steal(*victim, q, max, w.ids, w.counters);
        clock.queue_op(s.queues.structure(*victim, q), w.counters.sync_ops() - before.sync_ops());
        if (n > 0) {
            for (TaskId id : w.ids) w.batch.push_back({id, q});
            w.last_queue = q;
            return;
        }
    }
}

std::uint64_t execute(Shared& s, WorkerState& w, std::int64_t t_start) {
    w.resumes.clear();
    w.spawns.clear();
    w.sigs.clear();
    w.costs.clear();
    const bool log = s.config.record_invocations;
    for (const Item& it : w.batch) {
        const TaskId id = it.id;
        const FnId fn = s.pool.fn(id);
        const int state = s.pool.state(id);
        const auto parent = s.pool.parent(id);
        const int parent_state = s.spawn_state[id.index];
        const std::uint64_t seq = s.seq.fetch_add(1, std::memory_order_relaxed);
        s.pool.begin_epoch(id);

        Context ctx(s, w, id, state);
        TaskAction action;
        std::uint64_t cost;
        std::uint64_t tag;
        if (s.registry.is_native(fn)) {
            action = s.registry.native(fn)(ctx);
            cost = std::max<std::uint64_t>(1, ctx.cost());
            tag = ctx.tag();
        } else {
            const taskc::ExecResult r = w.interp->run(fn, state, ctx);
            action = r.action;
            cost = r.cost + ctx.cost();
            tag = r.path_tag;
        }
        if (s.lanes > 1) cost = (cost + s.lanes - 1) / s.lanes;

        JoinOutcome out;
        if (action.kind == TaskAction::Kind::finished) {
            out = s.pool.finish(id, action.result, w.id);
        } else {
            check_queue(action.resume_queue, s.queues.queues(), "taskwait");
            out = s.pool.suspend(id, action.next_state, action.resume_queue);
        }
        if (out.resume && !s.config.debug_drop_resumes) {
            w.resumes.push_back({out.task, out.resume_queue});
        }
        w.sigs.push_back({fn, state, tag, it.queue});
        w.costs.push_back(cost);
        if (log) {
            InvocationRecord rec;
            rec.task = id.key();
            rec.fn = fn;
            rec.state = state;
            rec.cost = cost;
            rec.has_parent = parent.has_value();
            rec.parent = parent ? parent->key() : 0;
            rec.parent_state = parent_state;
            rec.worker = w.id;
            rec.t_start = t_start;
            rec.seq = seq;
            w.log.push_back(rec);
        }
    }
    w.divergence.add_batch(static_cast<int>(w.batch.size()), distinct_paths(w.sigs));
    // Continuations first, then spawns with the most recent first.
    w.pending = w.resumes;
    w.pending.insert(w.pending.end(), w.spawns.rbegin(), w.spawns.rend());
    return batch_cost(w.sigs, w.costs);
}

void close_log(WorkerState& w, std::size_t from, std::int64_t t_end) {
    for (std::size_t i = from; i < w.log.size(); ++i) w.log[i].t_end = t_end;
}

}  // namespace sfj::detail
