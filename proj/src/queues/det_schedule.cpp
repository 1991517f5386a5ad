#include "sfj/queues/det_schedule.hpp"

#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "sfj/errors.hpp"

namespace sfj {

namespace {

struct ScheduleState {
    std::mutex mutex;
    std::condition_variable cv;
    int running = -1;  // body allowed to run, -1 = scheduler's turn
    std::vector<char> done;
    std::exception_ptr error;
};

thread_local ScheduleState* t_state = nullptr;
thread_local int t_index = -1;

void yield_to_scheduler() {
    std::unique_lock lock(t_state->mutex);
    t_state->running = -1;
    t_state->cv.notify_all();
    t_state->cv.wait(lock, [] { return t_state->running == t_index; });
}

}  // namespace

void DetSchedule::before_access() {
    if (t_state != nullptr) yield_to_scheduler();
}

void DetSchedule::run(std::vector<std::function<void()>> bodies, const Chooser& choose) {
    ScheduleState st;
    const int n = static_cast<int>(bodies.size());
    st.done.assign(n, 0);
    st.running = n > 0 ? -2 : -1;  // bodies start parked until everyone is registered

    std::vector<std::thread> threads;
    threads.reserve(n);
    int parked = 0;
    std::condition_variable parked_cv;
    for (int i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            t_state = &st;
            t_index = i;
            {
                std::unique_lock lock(st.mutex);
                ++parked;
                parked_cv.notify_all();
                st.cv.wait(lock, [&] { return st.running == i; });
            }
            try {
                bodies[i]();
            } catch (...) {
                std::lock_guard lock(st.mutex);
                if (!st.error) st.error = std::current_exception();
            }
            std::lock_guard lock(st.mutex);
            st.done[i] = 1;
            st.running = -1;
            st.cv.notify_all();
            t_state = nullptr;
        });
    }

    {
        std::unique_lock lock(st.mutex);
        parked_cv.wait(lock, [&] { return parked == n; });
        st.running = -1;
        for (;;) {
            st.cv.wait(lock, [&] { return st.running == -1; });
            std::vector<int> runnable;
            for (int i = 0; i < n; ++i) {
                if (!st.done[i]) runnable.push_back(i);
            }
            if (runnable.empty()) break;
            const std::size_t pick = choose(runnable.size());
            if (pick >= runnable.size()) throw InternalError("DetSchedule: chooser out of range");
            st.running = runnable[pick];
            st.cv.notify_all();
        }
    }
    for (auto& t : threads) t.join();
    if (st.error) std::rethrow_exception(st.error);
}

std::size_t enumerate_schedules(
    const std::function<std::vector<std::function<void()>>()>& make_bodies,
    const std::function<void()>& check, std::size_t limit) {
    struct Choice {
        std::size_t pick;
        std::size_t arity;
    };
    std::vector<Choice> prefix;
    std::size_t explored = 0;
    for (;;) {
        std::size_t pos = 0;
        DetSchedule::run(make_bodies(), [&](std::size_t arity) {
            if (pos < prefix.size()) {
                if (prefix[pos].arity != arity) {
                    throw InternalError("enumerate_schedules: bodies are not deterministic");
                }
                return prefix[pos++].pick;
            }
            prefix.push_back({0, arity});
            ++pos;
            return std::size_t{0};
        });
        check();
        if (++explored >= limit) break;
        while (!prefix.empty() && prefix.back().pick + 1 >= prefix.back().arity) prefix.pop_back();
        if (prefix.empty()) break;
        ++prefix.back().pick;
    }
    return explored;
}

}  // namespace sfj
