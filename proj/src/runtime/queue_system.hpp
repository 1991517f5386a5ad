#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sfj/config.hpp"
#include "sfj/queues/chase_lev.hpp"
#include "sfj/queues/counters.hpp"
#include "sfj/queues/global_queue.hpp"
#include "sfj/queues/warp_deque.hpp"

namespace sfj::detail {

/// The queue topology a run uses, behind one interface: per-worker batched deques,
/// per-worker Chase-Lev deques (sequential ablation and block-level workers), or
/// shared global queues.
class QueueSystem {
public:
    explicit QueueSystem(const RuntimeConfig& config);

    int queues() const noexcept { return queues_; }
    bool can_steal() const noexcept { return kind_ != Kind::global && workers_ > 1; }
    /// Index of the structure an operation on (worker, q) touches.
    int structure(WorkerId w, int q) const noexcept {
        return kind_ == Kind::global ? q : w * queues_ + q;
    }
    int num_structures() const noexcept {
        return kind_ == Kind::global ? queues_ : workers_ * queues_;
    }

    std::int64_t available(WorkerId w, int q) const;
    std::size_t pop(WorkerId w, int q, std::size_t max, std::vector<TaskId>& out,
                    QueueCounters& ctr);
    std::size_t steal(WorkerId victim, int q, std::size_t max, std::vector<TaskId>& out,
                      QueueCounters& ctr);
    void push(WorkerId w, int q, std::span<const TaskId> ids, QueueCounters& ctr);
    std::int64_t total() const;

private:
    enum class Kind { batched, chase_lev, global };
    Kind kind_;
    int workers_;
    int queues_;
    std::vector<std::unique_ptr<WarpDeque>> warp_;
    std::vector<std::unique_ptr<ChaseLevDeque>> cl_;
    std::vector<std::unique_ptr<GlobalQueue>> global_;
};

}  // namespace sfj::detail
