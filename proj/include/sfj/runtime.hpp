#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfj/buffers.hpp"
#include "sfj/config.hpp"
#include "sfj/metrics.hpp"
#include "sfj/rng.hpp"
#include "sfj/task_core.hpp"
#include "sfj/taskc/ir.hpp"

namespace sfj {

struct SpawnRequest {
    FnId fn = 0;
    std::vector<Value> args;
    int queue_index = 0;
};

/// What a task invocation sees of the runtime. Native task functions get the same
/// view as compiled ones and follow the same state-machine protocol: inspect
/// `state()`, spawn children, then return TaskAction::finish or TaskAction::suspend.
class InvocationContext {
public:
    virtual ~InvocationContext() = default;

    virtual TaskId self() const = 0;
    virtual int state() const = 0;
    virtual WorkerId worker() const = 0;
    /// Task data words: arguments first, then whatever the task keeps across states.
    virtual std::span<Value> data() = 0;
    Value arg(int i) { return data()[static_cast<std::size_t>(i)]; }
    /// Result of child `ordinal` of the most recently joined epoch.
    virtual Value load_result(int ordinal) = 0;
    /// Returns the child's ordinal in the current epoch (0 under assume_no_taskwait).
    virtual int spawn(FnId fn, std::span<const Value> args, int queue = 0) = 0;
    int spawn(FnId fn, std::initializer_list<Value> args, int queue = 0) {
        return spawn(fn, std::span<const Value>(args.begin(), args.size()), queue);
    }
    /// 1 for thread-level workers, block_size for block-level ones.
    virtual int lane_count() const = 0;
    virtual void add_cost(std::uint64_t units) = 0;
    virtual void set_path_tag(std::uint64_t tag) = 0;
    virtual BufferStore& buffers() = 0;

    /// Data-parallel loop over [begin, end): lane l handles begin+l, begin+l+lanes, ...
    /// Lanes run one after another on the host.
    template <class F>
    void for_range(std::int64_t begin, std::int64_t end, F&& body) {
        const std::int64_t lanes = lane_count();
        for (std::int64_t l = 0; l < lanes; ++l) {
            for (std::int64_t i = begin + l; i < end; i += lanes) body(i);
        }
    }
};

using NativeTaskFn = std::function<TaskAction(InvocationContext&)>;

/// Functions a run can dispatch: the compiled program's functions keep their
/// indices, native ones are appended after them.
class TaskRegistry {
public:
    TaskRegistry() = default;
    explicit TaskRegistry(std::shared_ptr<const taskc::IrProgram> program);

    FnId add_native(std::string name, int arity, NativeTaskFn fn);

    std::optional<FnId> find(std::string_view name) const;
    /// Throws UsageError for an unknown name.
    FnId id(std::string_view name) const;
    int size() const { return static_cast<int>(entries_.size()); }
    int arity(FnId fn) const;
    const std::string& name(FnId fn) const;
    bool is_native(FnId fn) const;
    /// Task functions only; compiled helpers are not dispatchable.
    bool is_task(FnId fn) const;
    const NativeTaskFn& native(FnId fn) const;
    const taskc::IrProgram* program() const { return program_.get(); }

private:
    struct Entry {
        std::string name;
        int arity = 0;
        bool task = true;
        NativeTaskFn native;
    };
    std::shared_ptr<const taskc::IrProgram> program_;
    std::vector<Entry> entries_;
};

/// Round-robin probe starting at `last`: the first queue with work, else the last
/// index probed.
template <class NonEmpty>
int select_queue_epaq(int last, int num_queues, NonEmpty&& non_empty) {
    int q = last;
    for (int i = 0; i < num_queues; ++i) {
        q = (last + i) % num_queues;
        if (non_empty(q)) return q;
    }
    return q;
}

/// Uniform over the other workers; nothing for a single worker.
std::optional<WorkerId> select_victim(WorkerId self, int workers, Rng& rng);

/// Executes `root` to completion and reports what happened. Throws ConfigError,
/// UsageError, PoolExhausted, QueueOverflow, ChildLimitExceeded, TaskFault or
/// LivenessFailure.
RunReport run(const TaskRegistry& registry, const SpawnRequest& root, const RuntimeConfig& config,
              BufferStore& buffers);

}  // namespace sfj
