#include <queue>
#include <tuple>

#include "engines.hpp"
#include "sfj/errors.hpp"

namespace sfj::detail {

namespace {

constexpr std::int64_t kMaxBackoff = 1024;

/// Queue operations occupy their structure; a worker only loses time when it has
/// to wait for an operation already in progress.
struct Occupancy {
    std::int64_t until = 0;
    WorkerId worker = -1;
};

class SimClock final : public Clock {
public:
    SimClock(std::vector<Occupancy>& busy, TimelineRecorder& tl)
        : busy_(busy), timeline_(tl) {}

    void start(WorkerId w, std::int64_t t) {
        worker_ = w;
        now_ = t;
    }
    void queue_op(int structure, std::uint64_t units) override {
        Occupancy& o = busy_[static_cast<std::size_t>(structure)];
        // Back-to-back operations of one worker never wait for each other.
        const std::int64_t begin = o.worker == worker_ ? now_ : std::max(now_, o.until);
        timeline_.idle(worker_, now_, begin);
        o.until = begin + static_cast<std::int64_t>(std::max<std::uint64_t>(1, units));
        o.worker = worker_;
        now_ = begin;
    }
    std::int64_t now() override { return now_; }
    void advance(std::int64_t d) { now_ += d; }

private:
    std::vector<Occupancy>& busy_;
    TimelineRecorder& timeline_;
    WorkerId worker_ = 0;
    std::int64_t now_ = 0;
};

}  // namespace

EngineResult run_deterministic(Shared& s, std::vector<WorkerState>& workers) {
    const int n = static_cast<int>(workers.size());
    std::vector<Occupancy> busy(static_cast<std::size_t>(s.queues.num_structures()));
    TimelineRecorder timeline(n);
    SimClock clock(busy, timeline);
    Rng order(s.config.seed, 0x5eedULL << 32);

    using Event = std::tuple<std::int64_t, std::uint64_t, WorkerId>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    for (WorkerId w = 0; w < n; ++w) events.emplace(0, order.next(), w);

    auto runnable = [&] {
        std::int64_t r = s.queues.total();
        for (const auto& w : workers) {
            r += static_cast<std::int64_t>(w.kept.size() + w.pending.size());
        }
        return r;
    };

    std::int64_t makespan = 0;
    while (!events.empty()) {
        auto [t, tie, wid] = events.top();
        (void)tie;
        events.pop();
        WorkerState& w = workers[static_cast<std::size_t>(wid)];
        if (w.pending.empty() && w.kept.empty() && s.pool.outstanding() == 0) continue;
        clock.start(wid, t);
        distribute(s, w, clock);
        acquire(s, w, clock);
        if (w.batch.empty()) {
            if (s.pool.outstanding() == 0) continue;
            if (runnable() == 0) {
                throw LivenessFailure("no runnable task while " +
                                      std::to_string(s.pool.outstanding()) +
                                      " tasks are outstanding");
            }
            const std::int64_t t0 = clock.now();
            clock.advance(w.backoff);
            timeline.idle(wid, t0, clock.now());
            w.backoff = std::min(kMaxBackoff, w.backoff * 2);
            events.emplace(clock.now(), order.next(), wid);
            continue;
        }
        w.backoff = 1;
        const std::int64_t t0 = clock.now();
        const std::size_t first = w.log.size();
        const auto cost = static_cast<std::int64_t>(execute(s, w, t0));
        const int lanes = s.lanes > 1 ? s.lanes : static_cast<int>(w.batch.size());
        timeline.task_exec(wid, t0, t0 + cost, lanes);
        clock.advance(cost);
        close_log(w, first, clock.now());
        makespan = std::max(makespan, clock.now());
        events.emplace(clock.now(), order.next(), wid);
    }
    if (s.pool.outstanding() != 0) {
        throw LivenessFailure("workers stopped with outstanding tasks");
    }
    return {makespan, timeline.finish(makespan)};
}

}  // namespace sfj::detail
