#include "queue_system.hpp"

namespace sfj::detail {

QueueSystem::QueueSystem(const RuntimeConfig& config)
    : workers_(config.num_workers()), queues_(config.queues_per_worker()) {
    const auto cap = static_cast<std::size_t>(config.queue_capacity());
    if (config.scheduler == SchedulerKind::global_queue) {
        kind_ = Kind::global;
        for (int q = 0; q < queues_; ++q) {
            global_.push_back(std::make_unique<GlobalQueue>(config.pool_capacity()));
        }
    } else if (config.granularity == Granularity::block_level ||
               config.queue_alg == QueueAlg::sequential_chase_lev) {
        kind_ = Kind::chase_lev;
        for (int i = 0; i < workers_ * queues_; ++i) {
            cl_.push_back(std::make_unique<ChaseLevDeque>(cap));
        }
    } else {
        kind_ = Kind::batched;
        for (int i = 0; i < workers_ * queues_; ++i) {
            warp_.push_back(std::make_unique<WarpDeque>(cap));
        }
    }
}

std::int64_t QueueSystem::available(WorkerId w, int q) const {
    switch (kind_) {
        case Kind::batched: return warp_[structure(w, q)]->available();
        case Kind::chase_lev: return cl_[structure(w, q)]->size();
        case Kind::global: return static_cast<std::int64_t>(global_[q]->size());
    }
    return 0;
}

std::size_t QueueSystem::pop(WorkerId w, int q, std::size_t max, std::vector<TaskId>& out,
                             QueueCounters& ctr) {
    switch (kind_) {
        case Kind::batched: return warp_[structure(w, q)]->pop_batch(max, out, &ctr);
        case Kind::chase_lev: return cl_[structure(w, q)]->pop_sequential(max, out, &ctr);
        case Kind::global: return global_[q]->dequeue(max, out, &ctr);
    }
    return 0;
}

std::size_t QueueSystem::steal(WorkerId victim, int q, std::size_t max, std::vector<TaskId>& out,
                               QueueCounters& ctr) {
    switch (kind_) {
        case Kind::batched: return warp_[structure(victim, q)]->steal_batch(max, out, &ctr);
        case Kind::chase_lev: return cl_[structure(victim, q)]->steal_sequential(max, out, &ctr);
        case Kind::global: return 0;
    }
    return 0;
}

void QueueSystem::push(WorkerId w, int q, std::span<const TaskId> ids, QueueCounters& ctr) {
    switch (kind_) {
        case Kind::batched: warp_[structure(w, q)]->push_batch(ids, &ctr); return;
        case Kind::chase_lev:
            for (TaskId id : ids) cl_[structure(w, q)]->push(id, &ctr);
            return;
        case Kind::global: global_[q]->enqueue(ids, &ctr); return;
    }
}

std::int64_t QueueSystem::total() const {
    std::int64_t n = 0;
    for (const auto& d : warp_) n += d->available();
    for (const auto& d : cl_) n += d->size();
    for (const auto& g : global_) n += static_cast<std::int64_t>(g->size());
    return n;
}

}  // namespace sfj::detail
