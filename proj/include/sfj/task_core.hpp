#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "sfj/config.hpp"

namespace sfj {

/// Handle into the pre-allocated record pool. Valid iff `generation` matches the slot.
struct TaskId {
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t index = kNone;
    std::uint32_t generation = 0;

    constexpr bool is_none() const noexcept { return index == kNone; }
    friend constexpr bool operator==(TaskId, TaskId) = default;
    /// Packs (index, generation) into one ordered key.
    constexpr std::uint64_t key() const noexcept {
        return (static_cast<std::uint64_t>(index) << 32) | generation;
    }
};

/// Result of a finish or suspend: either nothing, or a continuation that became runnable.
struct JoinOutcome {
    bool resume = false;
    TaskId task;
    int resume_queue = 0;

    static JoinOutcome none() { return {}; }
    static JoinOutcome resume_parent(TaskId t, int q) { return {true, t, q}; }
};

/// What one invocation of a task's state machine asks the runtime to do next.
struct TaskAction {
    enum class Kind { finished, suspend };
    Kind kind = Kind::finished;
    Value result = 0;
    int next_state = 0;
    int resume_queue = 0;

    static TaskAction finish(Value v) { return {Kind::finished, v, 0, 0}; }
    static TaskAction suspend(int next_state, int resume_queue) {
        return {Kind::suspend, 0, next_state, resume_queue};
    }
};

/// Fixed-capacity store of task records with per-worker free lists.
///
/// Join protocol: an invocation starts with join_counter = 1 (the running task's own
/// token), every spawned child adds one, every child finish and the parent's suspend
/// subtract one. Whoever moves the counter to zero makes the continuation runnable.
/// Child results are copied into the parent at finish, so a finished child's record
/// is recycled immediately. A task that finishes with unjoined children keeps its
/// slot until the last of them finishes.
class TaskPool {
public:
    static constexpr WorkerId kFallbackHome = -1;

    /// `fn_arity[f]` is checked on alloc when f is inside the table.
    TaskPool(const RuntimeConfig& config, std::vector<int> fn_arity = {});
    ~TaskPool();
    TaskPool(const TaskPool&) = delete;
    TaskPool& operator=(const TaskPool&) = delete;

    std::uint64_t capacity() const noexcept { return capacity_; }
    int num_free_lists() const noexcept { return static_cast<int>(workers_.size()); }
    int data_words() const noexcept { return data_words_; }
    int max_child_tasks() const noexcept { return max_child_; }

    TaskId alloc(WorkerId worker, FnId fn, std::span<const Value> args,
                 std::optional<TaskId> parent = std::nullopt, int ordinal = 0);

    void begin_epoch(TaskId id);
    int register_child(TaskId parent);
    JoinOutcome finish(TaskId id, Value result, WorkerId current);
    JoinOutcome suspend(TaskId id, int next_state, int resume_queue);
    Value load_result(TaskId parent, int ordinal) const;

    std::int64_t outstanding() const noexcept {
        return outstanding_.load(std::memory_order_acquire);
    }
    bool root_finished() const noexcept { return root_finished_.load(std::memory_order_acquire); }
    Value root_result() const noexcept { return root_result_; }

    bool is_valid(TaskId id) const noexcept;
    FnId fn(TaskId id) const;
    int state(TaskId id) const;
    std::optional<TaskId> parent(TaskId id) const;
    int ordinal(TaskId id) const;
    int join_counter(TaskId id) const;
    int home_worker(TaskId id) const;
    std::span<Value> data(TaskId id);
    std::span<const Value> data(TaskId id) const;

    /// Writes to join_counter or child_results (instrumented configs only).
    std::uint64_t join_metadata_writes() const noexcept {
        return join_writes_.load(std::memory_order_relaxed);
    }
    /// Per-slot lifecycle counters (instrumented configs only).
    std::uint64_t slot_allocs(std::uint32_t slot) const;
    std::uint64_t slot_finishes(std::uint32_t slot) const;
    std::uint64_t total_allocs() const noexcept { return allocs_.load(std::memory_order_relaxed); }
    std::uint64_t total_finishes() const noexcept {
        return finishes_.load(std::memory_order_relaxed);
    }

private:
    struct Record;
    struct WorkerFreeList;

    Record& checked(TaskId id, const char* op) const;
    std::uint32_t take_free_slot(WorkerId worker);
    void release_slot(std::uint32_t slot, WorkerId current);
    void retire(std::uint32_t slot, WorkerId current);
    void note_join_write() noexcept;

    std::uint64_t capacity_;
    int data_words_;
    int max_child_;
    bool assume_no_taskwait_;
    bool instrument_;
    std::vector<int> fn_arity_;

    std::unique_ptr<Record[]> records_;
    std::vector<Value> data_;
    std::vector<Value> child_results_;
    std::unique_ptr<std::atomic<std::uint32_t>[]> next_free_;
    std::vector<std::unique_ptr<WorkerFreeList>> workers_;

    std::mutex fallback_mutex_;
    std::vector<std::uint32_t> fallback_;

    std::atomic<std::int64_t> outstanding_{0};
    std::atomic<bool> root_finished_{false};
    Value root_result_ = 0;

    std::atomic<std::uint64_t> join_writes_{0};
    std::atomic<std::uint64_t> allocs_{0};
    std::atomic<std::uint64_t> finishes_{0};
    std::unique_ptr<std::atomic<std::uint64_t>[]> slot_allocs_;
    std::unique_ptr<std::atomic<std::uint64_t>[]> slot_finishes_;
};

}  // namespace sfj
