#include "sfj/queues/global_queue.hpp"

#include "sfj/errors.hpp"

namespace sfj {

GlobalQueue::GlobalQueue(std::size_t capacity) : ring_(capacity) {}

void GlobalQueue::enqueue(std::span<const TaskId> ids, QueueCounters* ctr) {
    if (ids.empty()) return;
    std::lock_guard lock(mutex_);
    if (ctr) ++ctr->lock_acquisitions;
    if (tail_ - head_ + ids.size() > ring_.size()) throw QueueOverflow(ring_.size());
    for (TaskId id : ids) ring_[tail_++ % ring_.size()] = id;
    if (ctr) {
        ++ctr->push_ops;
        ctr->pushed_tasks += ids.size();
    }
}

std::size_t GlobalQueue::dequeue(std::size_t max, std::vector<TaskId>& out, QueueCounters* ctr) {
    std::lock_guard lock(mutex_);
    if (ctr) {
        ++ctr->lock_acquisitions;
        ++ctr->pop_attempts;
    }
    std::size_t n = 0;
    while (n < max && head_ < tail_) {
        out.push_back(ring_[head_++ % ring_.size()]);
        ++n;
    }
    if (ctr && n > 0) {
        ++ctr->claims;
        ctr->popped_tasks += n;
    }
    return n;
}

std::size_t GlobalQueue::size() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(tail_ - head_);
}

}  // namespace sfj
