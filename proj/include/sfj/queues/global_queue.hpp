#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include "sfj/queues/counters.hpp"
#include "sfj/task_core.hpp"

namespace sfj {

/// Single shared FIFO that every worker pushes to and pops from under one lock.
/// Baseline for the work-stealing ablation.
class GlobalQueue {
public:
    explicit GlobalQueue(std::size_t capacity);

    std::size_t capacity() const noexcept { return ring_.size(); }

    void enqueue(std::span<const TaskId> ids, QueueCounters* ctr = nullptr);
    /// Appends up to `max` ids (oldest first) to `out`.
    std::size_t dequeue(std::size_t max, std::vector<TaskId>& out, QueueCounters* ctr = nullptr);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<TaskId> ring_;
    std::uint64_t head_ = 0;
    std::uint64_t tail_ = 0;
};

}  // namespace sfj
