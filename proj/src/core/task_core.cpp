#include "sfj/task_core.hpp"

#include <algorithm>
#include <string>

#include "sfj/errors.hpp"

namespace sfj {

struct TaskPool::Record {
    std::atomic<std::uint32_t> generation{0};
    std::atomic<bool> allocated{false};
    FnId fn = 0;
    int state = 0;
    TaskId parent;
    int ordinal = 0;
    std::atomic<int> join_counter{0};
    int epoch_children = 0;
    int joined_children = 0;
    int resume_queue = 0;
    int home = kFallbackHome;
    // Finished while unjoined children still run; the last child frees the slot.
    std::atomic<bool> detached{false};
};

struct TaskPool::WorkerFreeList {
    std::vector<std::uint32_t> local;                    // owner only
    std::atomic<std::uint32_t> remote_head{TaskId::kNone};  // pushed by any worker
};

TaskPool::TaskPool(const RuntimeConfig& config, std::vector<int> fn_arity)
    : fn_arity_(std::move(fn_arity)) {
    config.validate();
    capacity_ = config.pool_capacity();
    data_words_ = std::max(1, config.max_task_data_size / 8);
    max_child_ = config.max_child_tasks;
    assume_no_taskwait_ = config.assume_no_taskwait;
    instrument_ = config.instrument;

    records_ = std::make_unique<Record[]>(capacity_);
    data_.assign(capacity_ * data_words_, 0);
    child_results_.assign(capacity_ * max_child_, 0);
    next_free_ = std::make_unique<std::atomic<std::uint32_t>[]>(capacity_);
    if (instrument_) {
        slot_allocs_ = std::make_unique<std::atomic<std::uint64_t>[]>(capacity_);
        slot_finishes_ = std::make_unique<std::atomic<std::uint64_t>[]>(capacity_);
    }

    // A quarter of the pool is a shared fallback segment; the rest is split evenly
    // across workers. Remainders go to the fallback.
    const int workers = config.num_workers();
    const std::uint64_t fallback = capacity_ / 4;
    const std::uint64_t share = (capacity_ - fallback) / static_cast<std::uint64_t>(workers);
    workers_.reserve(workers);
    std::uint32_t slot = 0;
    for (int w = 0; w < workers; ++w) {
        auto list = std::make_unique<WorkerFreeList>();
        list->local.reserve(share);
        for (std::uint64_t i = 0; i < share; ++i, ++slot) records_[slot].home = w;
        // Highest slot is popped first; push in reverse so slot order is ascending.
        for (std::uint32_t s = slot; s > slot - share; --s) list->local.push_back(s - 1);
        workers_.push_back(std::move(list));
    }
    for (std::uint32_t s = static_cast<std::uint32_t>(capacity_); s > slot; --s) {
        records_[s - 1].home = kFallbackHome;
        fallback_.push_back(s - 1);
    }
}

TaskPool::~TaskPool() = default;

void TaskPool::note_join_write() noexcept {
    if (instrument_) join_writes_.fetch_add(1, std::memory_order_relaxed);
}

bool TaskPool::is_valid(TaskId id) const noexcept {
    if (id.index >= capacity_) return false;
    const Record& r = records_[id.index];
    return r.allocated.load(std::memory_order_acquire) &&
           r.generation.load(std::memory_order_acquire) == id.generation;
}

TaskPool::Record& TaskPool::checked(TaskId id, const char* op) const {
    if (!is_valid(id)) {
        throw InvalidHandle(std::string(op) + ": stale or invalid task handle (index " +
                            std::to_string(id.index) + ", generation " +
                            std::to_string(id.generation) + ")");
    }
    return records_[id.index];
}

std::uint32_t TaskPool::take_free_slot(WorkerId worker) {
    if (worker < 0 || worker >= num_free_lists()) {
        throw UsageError("alloc_task: unknown worker " + std::to_string(worker));
    }
    WorkerFreeList& list = *workers_[worker];
    if (list.local.empty()) {
        std::uint32_t head = list.remote_head.exchange(TaskId::kNone, std::memory_order_acquire);
        while (head != TaskId::kNone) {
            list.local.push_back(head);
            head = next_free_[head].load(std::memory_order_relaxed);
        }
    }
    if (!list.local.empty()) {
        std::uint32_t s = list.local.back();
        list.local.pop_back();
        return s;
    }
    std::lock_guard lock(fallback_mutex_);
    if (fallback_.empty()) throw PoolExhausted(capacity_);
    std::uint32_t s = fallback_.back();
    fallback_.pop_back();
    return s;
}

void TaskPool::release_slot(std::uint32_t slot, WorkerId current) {
    const int home = records_[slot].home;
    if (home == kFallbackHome) {
        std::lock_guard lock(fallback_mutex_);
        fallback_.push_back(slot);
        return;
    }
    WorkerFreeList& list = *workers_[home];
    if (home == current) {
        list.local.push_back(slot);
        return;
    }
    std::uint32_t head = list.remote_head.load(std::memory_order_relaxed);
    do {
        next_free_[slot].store(head, std::memory_order_relaxed);
    } while (!list.remote_head.compare_exchange_weak(head, slot, std::memory_order_release,
                                                     std::memory_order_relaxed));
}

TaskId TaskPool::alloc(WorkerId worker, FnId fn, std::span<const Value> args,
                       std::optional<TaskId> parent, int ordinal) {
    if (fn >= 0 && static_cast<std::size_t>(fn) < fn_arity_.size() &&
        static_cast<int>(args.size()) != fn_arity_[fn]) {
        throw UsageError("alloc_task: function " + std::to_string(fn) + " expects " +
                         std::to_string(fn_arity_[fn]) + " arguments, got " +
                         std::to_string(args.size()));
    }
    if (static_cast<int>(args.size()) > data_words_) {
        throw UsageError("alloc_task: " + std::to_string(args.size()) +
                         " arguments exceed the task data size");
    }
    if (parent && (ordinal < 0 || ordinal >= max_child_)) {
        throw UsageError("alloc_task: ordinal out of range");
    }
    const std::uint32_t slot = take_free_slot(worker);
    Record& r = records_[slot];
    r.fn = fn;
    r.state = 0;
    r.parent = parent.value_or(TaskId{});
    r.ordinal = parent ? ordinal : 0;
    r.join_counter.store(0, std::memory_order_relaxed);
    r.epoch_children = 0;
    r.joined_children = 0;
    r.resume_queue = 0;

    Value* d = data_.data() + static_cast<std::size_t>(slot) * data_words_;
    std::copy(args.begin(), args.end(), d);
    std::fill(d + args.size(), d + data_words_, Value{0});

    outstanding_.fetch_add(1, std::memory_order_acq_rel);
    allocs_.fetch_add(1, std::memory_order_relaxed);
    if (instrument_) slot_allocs_[slot].fetch_add(1, std::memory_order_relaxed);
    r.allocated.store(true, std::memory_order_release);
    return TaskId{slot, r.generation.load(std::memory_order_relaxed)};
}

void TaskPool::begin_epoch(TaskId id) {
    Record& r = checked(id, "begin_epoch");
    r.epoch_children = 0;
    if (assume_no_taskwait_) return;
    r.join_counter.store(1, std::memory_order_relaxed);
    note_join_write();
}

int TaskPool::register_child(TaskId parent) {
    Record& r = checked(parent, "register_child");
    if (r.epoch_children >= max_child_) throw ChildLimitExceeded(max_child_);
    const int ord = r.epoch_children++;
    r.join_counter.fetch_add(1, std::memory_order_relaxed);
    note_join_write();
    return ord;
}

JoinOutcome TaskPool::finish(TaskId id, Value result, WorkerId current) {
    Record& r = checked(id, "finish_task");
    if (r.detached.load(std::memory_order_acquire)) {
        throw InvalidHandle("finish_task: task already finished");
    }
    JoinOutcome out;
    if (r.parent.is_none()) {
        root_result_ = result;
        root_finished_.store(true, std::memory_order_release);
    } else if (!assume_no_taskwait_) {
        Record& p = checked(r.parent, "finish_task (parent)");
        child_results_[static_cast<std::size_t>(r.parent.index) * max_child_ + r.ordinal] = result;
        note_join_write();
        // Release publishes the result; the actor that reaches zero acquires it.
        const int prev = p.join_counter.fetch_sub(1, std::memory_order_acq_rel);
        note_join_write();
        if (prev == 1) {
            if (p.detached.load(std::memory_order_acquire)) {
                retire(r.parent.index, current);
            } else {
                out = JoinOutcome::resume_parent(r.parent, p.resume_queue);
            }
        }
    }
    finishes_.fetch_add(1, std::memory_order_relaxed);
    if (instrument_) slot_finishes_[id.index].fetch_add(1, std::memory_order_relaxed);

    bool free_now = true;
    if (!assume_no_taskwait_ && r.epoch_children > 0) {
        // Children spawned since the last join are still counted against our token.
        r.detached.store(true, std::memory_order_release);
        const int prev = r.join_counter.fetch_sub(1, std::memory_order_acq_rel);
        note_join_write();
        free_now = prev == 1;
    }
    if (free_now) retire(id.index, current);
    outstanding_.fetch_sub(1, std::memory_order_acq_rel);
    return out;
}

void TaskPool::retire(std::uint32_t slot, WorkerId current) {
    Record& r = records_[slot];
    r.detached.store(false, std::memory_order_relaxed);
    r.allocated.store(false, std::memory_order_relaxed);
    r.generation.fetch_add(1, std::memory_order_release);
    release_slot(slot, current);
}

JoinOutcome TaskPool::suspend(TaskId id, int next_state, int resume_queue) {
    Record& r = checked(id, "suspend_task");
    if (assume_no_taskwait_) {
        throw UsageError("suspend_task: taskwait executed with assume_no_taskwait set");
    }
    if (next_state <= r.state) {
        throw UsageError("suspend_task: next_state " + std::to_string(next_state) +
                         " does not advance past state " + std::to_string(r.state));
    }
    r.state = next_state;
    r.resume_queue = resume_queue;
    r.joined_children = r.epoch_children;
    const int prev = r.join_counter.fetch_sub(1, std::memory_order_acq_rel);
    note_join_write();
    if (prev == 1) return JoinOutcome::resume_parent(id, resume_queue);
    return JoinOutcome::none();
}

Value TaskPool::load_result(TaskId parent, int ordinal) const {
    if (assume_no_taskwait_) {
        throw UsageError("load_result: not available with assume_no_taskwait set");
    }
    const Record& r = checked(parent, "load_result");
    if (ordinal < 0 || ordinal >= r.joined_children) {
        throw UsageError("load_result: ordinal " + std::to_string(ordinal) +
                         " not spawned in the joined epoch (" +
                         std::to_string(r.joined_children) + " children)");
    }
    return child_results_[static_cast<std::size_t>(parent.index) * max_child_ + ordinal];
}

FnId TaskPool::fn(TaskId id) const { return checked(id, "fn").fn; }
int TaskPool::state(TaskId id) const { return checked(id, "state").state; }
int TaskPool::ordinal(TaskId id) const { return checked(id, "ordinal").ordinal; }
int TaskPool::home_worker(TaskId id) const { return checked(id, "home_worker").home; }

std::optional<TaskId> TaskPool::parent(TaskId id) const {
    const Record& r = checked(id, "parent");
    if (r.parent.is_none()) return std::nullopt;
    return r.parent;
}

int TaskPool::join_counter(TaskId id) const {
    return checked(id, "join_counter").join_counter.load(std::memory_order_acquire);
}

std::span<Value> TaskPool::data(TaskId id) {
    checked(id, "data");
    return {data_.data() + static_cast<std::size_t>(id.index) * data_words_,
            static_cast<std::size_t>(data_words_)};
}

std::span<const Value> TaskPool::data(TaskId id) const {
    checked(id, "data");
    return {data_.data() + static_cast<std::size_t>(id.index) * data_words_,
            static_cast<std::size_t>(data_words_)};
}

std::uint64_t TaskPool::slot_allocs(std::uint32_t slot) const {
    if (!instrument_ || slot >= capacity_) return 0;
    return slot_allocs_[slot].load(std::memory_order_relaxed);
}

std::uint64_t TaskPool::slot_finishes(std::uint32_t slot) const {
    if (!instrument_ || slot >= capacity_) return 0;
    return slot_finishes_[slot].load(std::memory_order_relaxed);
}

}  // namespace sfj
