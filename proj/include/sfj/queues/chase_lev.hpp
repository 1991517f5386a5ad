#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sfj/errors.hpp"
#include "sfj/queues/counters.hpp"
#include "sfj/queues/warp_deque.hpp"
#include "sfj/task_core.hpp"

namespace sfj {

/// Fixed-capacity Chase-Lev deque: owner push/pop at `bottom`, steals at `top`.
template <template <class> class Atom = std::atomic>
class BasicChaseLevDeque {
public:
    explicit BasicChaseLevDeque(std::size_t capacity)
        : capacity_(capacity), entries_(std::make_unique<Atom<std::uint64_t>[]>(capacity)) {
        for (std::size_t i = 0; i < capacity_; ++i) {
            entries_[i].store(pack_task(TaskId{}), std::memory_order_relaxed);
        }
    }

    std::size_t capacity() const noexcept { return capacity_; }

    void push(TaskId id, QueueCounters* ctr = nullptr) {
        const std::int64_t b = bottom_.load(std::memory_order_relaxed);
        const std::int64_t t = top_.load(std::memory_order_acquire);
        if (b - t >= static_cast<std::int64_t>(capacity_)) throw QueueOverflow(capacity_);
        entries_[slot(b)].store(pack_task(id), std::memory_order_relaxed);
        std::atomic_thread_fence(std::memory_order_release);
        bottom_.store(b + 1, std::memory_order_relaxed);
        if (ctr) {
            ++ctr->push_ops;
            ++ctr->pushed_tasks;
        }
    }

    std::optional<TaskId> pop(QueueCounters* ctr = nullptr) {
        if (ctr) ++ctr->pop_attempts;
        const std::int64_t b = bottom_.load(std::memory_order_relaxed) - 1;
        bottom_.store(b, std::memory_order_relaxed);
        std::atomic_thread_fence(std::memory_order_seq_cst);
        std::int64_t t = top_.load(std::memory_order_relaxed);
        std::optional<TaskId> result;
        if (t <= b) {
            result = unpack_task(entries_[slot(b)].load(std::memory_order_relaxed));
            if (t == b) {
                // Last element: race the thieves for it.
                if (!top_.compare_exchange_strong(t, t + 1, std::memory_order_seq_cst,
                                                  std::memory_order_relaxed)) {
                    result.reset();
                }
                bottom_.store(b + 1, std::memory_order_relaxed);
            }
        } else {
            bottom_.store(b + 1, std::memory_order_relaxed);
        }
        if (ctr && result) {
            ++ctr->claims;
            ++ctr->popped_tasks;
        }
        return result;
    }

    std::optional<TaskId> steal(QueueCounters* ctr = nullptr) {
        if (ctr) ++ctr->steal_attempts;
        std::int64_t t = top_.load(std::memory_order_acquire);
        std::atomic_thread_fence(std::memory_order_seq_cst);
        const std::int64_t b = bottom_.load(std::memory_order_acquire);
        if (t < b) {
            const TaskId id = unpack_task(entries_[slot(t)].load(std::memory_order_relaxed));
            if (top_.compare_exchange_strong(t, t + 1, std::memory_order_seq_cst,
                                             std::memory_order_relaxed)) {
                if (ctr) {
                    ++ctr->claims;
                    ++ctr->stolen_tasks;
                }
                return id;
            }
            if (ctr) ++ctr->cas_failures;
        }
        if (ctr) ++ctr->failed_steals;
        return std::nullopt;
    }

    /// Ablation path: up to `max` single-element pops, stopping at the first miss.
    std::size_t pop_sequential(std::size_t max, std::vector<TaskId>& out,
                               QueueCounters* ctr = nullptr) {
        std::size_t got = 0;
        while (got < max) {
            auto id = pop(ctr);
            if (!id) break;
            out.push_back(*id);
            ++got;
        }
        return got;
    }

    /// Ablation path: up to `max` single-element steals, stopping at the first miss.
    std::size_t steal_sequential(std::size_t max, std::vector<TaskId>& out,
                                 QueueCounters* ctr = nullptr) {
        std::size_t got = 0;
        while (got < max) {
            auto id = steal(ctr);
            if (!id) break;
            out.push_back(*id);
            ++got;
        }
        return got;
    }

    std::int64_t size() const {
        const std::int64_t b = bottom_.load(std::memory_order_acquire);
        const std::int64_t t = top_.load(std::memory_order_acquire);
        return b > t ? b - t : 0;
    }

private:
    std::size_t slot(std::int64_t logical) const noexcept {
        return static_cast<std::size_t>(logical) % capacity_;
    }

    std::size_t capacity_;
    std::unique_ptr<Atom<std::uint64_t>[]> entries_;
    Atom<std::int64_t> top_{0};
    Atom<std::int64_t> bottom_{0};
};

using ChaseLevDeque = BasicChaseLevDeque<>;

}  // namespace sfj
