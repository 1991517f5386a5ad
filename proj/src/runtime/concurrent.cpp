#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "engines.hpp"
#include "sfj/errors.hpp"

namespace sfj::detail {

namespace {

using SteadyClock = std::chrono::steady_clock;

class WallClock final : public Clock {
public:
    explicit WallClock(SteadyClock::time_point origin) : origin_(origin) {}
    void queue_op(int, std::uint64_t) override {}
    std::int64_t now() override {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(SteadyClock::now() - origin_)
            .count();
    }

private:
    SteadyClock::time_point origin_;
};

struct Control {
    std::atomic<bool> stop{false};
    std::atomic<int> executing{0};
    std::atomic<std::uint64_t> progress{0};
    std::atomic<std::int64_t> makespan{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    void fail(std::exception_ptr e) {
        std::lock_guard lock(error_mutex);
        if (!error) error = e;
        stop.store(true, std::memory_order_release);
    }
};

constexpr auto kLivenessTimeout = std::chrono::seconds(1);

}  // namespace

EngineResult run_concurrent(Shared& s, std::vector<WorkerState>& workers) {
    const int n = static_cast<int>(workers.size());
    int threads = s.config.max_threads > 0
                      ? s.config.max_threads
                      : std::max(2, static_cast<int>(std::thread::hardware_concurrency()));
    threads = std::max(1, std::min(threads, n));

    TimelineRecorder timeline(n);
    Control ctl;
    const auto origin = SteadyClock::now();

    auto body = [&](int t) {
        WallClock clock(origin);
        std::uint64_t seen_progress = ~0ULL;
        SteadyClock::time_point stalled_since{};
        int spins = 0;
        try {
            while (!ctl.stop.load(std::memory_order_acquire)) {
                bool did_work = false;
                bool holding = false;
                for (int wid = t; wid < n; wid += threads) {
                    WorkerState& w = workers[static_cast<std::size_t>(wid)];
                    distribute(s, w, clock);
                    acquire(s, w, clock);
                    if (w.batch.empty()) continue;
                    ctl.executing.fetch_add(1, std::memory_order_acq_rel);
                    const std::int64_t t0 = clock.now();
                    const std::size_t first = w.log.size();
                    execute(s, w, t0);
                    const std::int64_t t1 = std::max(clock.now(), t0 + 1);
                    close_log(w, first, t1);
                    const int lanes = s.lanes > 1 ? s.lanes : static_cast<int>(w.batch.size());
                    timeline.task_exec(wid, t0, t1, lanes);
                    std::int64_t m = ctl.makespan.load(std::memory_order_relaxed);
                    while (m < t1 && !ctl.makespan.compare_exchange_weak(m, t1)) {
                    }
                    ctl.progress.fetch_add(1, std::memory_order_acq_rel);
                    ctl.executing.fetch_sub(1, std::memory_order_acq_rel);
                    did_work = true;
                    holding = holding || !w.pending.empty() || !w.kept.empty();
                }
                if (did_work || holding) {
                    spins = 0;
                    seen_progress = ~0ULL;
                    continue;
                }
                if (s.pool.outstanding() == 0) return;
                // Nothing local: back off, and watch for a run that stopped moving.
                const std::uint64_t p = ctl.progress.load(std::memory_order_acquire);
                const auto now = SteadyClock::now();
                if (p != seen_progress || ctl.executing.load(std::memory_order_acquire) > 0) {
                    seen_progress = p;
                    stalled_since = now;
                } else if (now - stalled_since > kLivenessTimeout) {
                    throw LivenessFailure("no progress for 1 s while " +
                                          std::to_string(s.pool.outstanding()) +
                                          " tasks are outstanding");
                }
                if (++spins < 64) {
                    std::this_thread::yield();
                } else {
                    std::this_thread::sleep_for(std::chrono::microseconds(
                        std::min(1 << std::min(spins - 64, 10), 1024)));
                }
            }
        } catch (...) {
            ctl.fail(std::current_exception());
        }
    };

    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(body, t);
    body(0);
    for (auto& th : pool) th.join();
    if (ctl.error) std::rethrow_exception(ctl.error);
    const std::int64_t makespan = ctl.makespan.load();
    return {makespan, timeline.finish(makespan)};
}

}  // namespace sfj::detail
