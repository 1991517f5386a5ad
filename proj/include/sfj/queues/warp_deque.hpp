#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sfj/errors.hpp"
#include "sfj/queues/counters.hpp"
#include "sfj/task_core.hpp"

namespace sfj {

inline std::uint64_t pack_task(TaskId t) noexcept { return t.key(); }
inline TaskId unpack_task(std::uint64_t k) noexcept {
    return TaskId{static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)};
}

/// Warp-level work-stealing deque with a claim-by-count protocol.
///
/// `count` is the number of published, not-yet-claimed entries. Consumers reserve
/// entries by a CAS decrement of `count` and only then read them: the owner from the
/// tail end, thieves from the head end. Thieves are serialized by `lock_`. Pushes
/// write entries first and publish them with a release increment of `count`.
/// Logical indices grow monotonically and map to slots modulo the capacity.
template <template <class> class Atom = std::atomic>
class BasicWarpDeque {
public:
    explicit BasicWarpDeque(std::size_t capacity, TaskId fill = TaskId{})
        : capacity_(capacity), entries_(std::make_unique<Atom<std::uint64_t>[]>(capacity)) {
        for (std::size_t i = 0; i < capacity_; ++i) {
            entries_[i].store(pack_task(fill), std::memory_order_relaxed);
        }
    }

    std::size_t capacity() const noexcept { return capacity_; }

    /// Owner only.
    void push_batch(std::span<const TaskId> ids, QueueCounters* ctr = nullptr) {
        if (ids.empty()) return;
        const std::int64_t h = head_.load(std::memory_order_acquire);
        const auto n = static_cast<std::int64_t>(ids.size());
        if (tail_ - h + n > static_cast<std::int64_t>(capacity_)) throw QueueOverflow(capacity_);
        for (std::int64_t i = 0; i < n; ++i) {
            entries_[slot(tail_ + i)].store(pack_task(ids[i]), std::memory_order_relaxed);
        }
        tail_ += n;
        count_.fetch_add(n, std::memory_order_release);
        if (ctr) {
            ++ctr->push_ops;
            ctr->pushed_tasks += ids.size();
        }
    }

    /// Owner only. Appends up to `max` ids to `out`, most recently pushed first.
    std::size_t pop_batch(std::size_t max, std::vector<TaskId>& out, QueueCounters* ctr = nullptr) {
        if (ctr) ++ctr->pop_attempts;
        const std::int64_t k = claim(max, ctr);
        for (std::int64_t i = 1; i <= k; ++i) {
            out.push_back(unpack_task(entries_[slot(tail_ - i)].load(std::memory_order_relaxed)));
        }
        tail_ -= k;
        if (ctr) ctr->popped_tasks += static_cast<std::uint64_t>(k);
        return static_cast<std::size_t>(k);
    }

    /// Any non-owner. Non-blocking: a held lock or an empty deque yields nothing.
    /// Appends up to `max` ids to `out`, oldest first.
    std::size_t steal_batch(std::size_t max, std::vector<TaskId>& out,
                            QueueCounters* ctr = nullptr) {
        if (ctr) ++ctr->steal_attempts;
        bool expected = false;
        if (!lock_.compare_exchange_strong(expected, true, std::memory_order_acquire,
                                           std::memory_order_relaxed)) {
            if (ctr) {
                ++ctr->lock_failures;
                ++ctr->failed_steals;
            }
            return 0;
        }
        if (ctr) ++ctr->lock_acquisitions;
        const std::int64_t k = claim(max, ctr);
        if (k > 0) {
            const std::int64_t h = head_.load(std::memory_order_relaxed);
            for (std::int64_t i = 0; i < k; ++i) {
                out.push_back(unpack_task(entries_[slot(h + i)].load(std::memory_order_relaxed)));
            }
            head_.store(h + k, std::memory_order_release);
        }
        lock_.store(false, std::memory_order_release);
        if (ctr) {
            ctr->stolen_tasks += static_cast<std::uint64_t>(k);
            if (k == 0) ++ctr->failed_steals;
        }
        return static_cast<std::size_t>(k);
    }

    /// Snapshot of the available count (may be stale under concurrency).
    std::int64_t available() const { return count_.load(std::memory_order_acquire); }
    std::int64_t head() const { return head_.load(std::memory_order_acquire); }
    /// Owner-local end; meaningful only on the owner's thread.
    std::int64_t tail() const noexcept { return tail_; }

private:
    std::size_t slot(std::int64_t logical) const noexcept {
        return static_cast<std::size_t>(logical) % capacity_;
    }

    std::int64_t claim(std::size_t max, QueueCounters* ctr) {
        std::int64_t c = count_.load(std::memory_order_acquire);
        for (;;) {
            const std::int64_t k = std::min<std::int64_t>(c, static_cast<std::int64_t>(max));
            if (k <= 0) return 0;
            if (count_.compare_exchange_weak(c, c - k, std::memory_order_acq_rel,
                                             std::memory_order_acquire)) {
                if (ctr) ++ctr->claims;
                return k;
            }
            if (ctr) ++ctr->cas_failures;
        }
    }

    std::size_t capacity_;
    std::unique_ptr<Atom<std::uint64_t>[]> entries_;
    Atom<std::int64_t> head_{0};
    Atom<std::int64_t> count_{0};
    Atom<bool> lock_{false};
    std::int64_t tail_ = 0;
};

using WarpDeque = BasicWarpDeque<>;

}  // namespace sfj
