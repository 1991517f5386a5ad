#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <vector>

namespace sfj {

/// Runs a set of thread bodies one step at a time. A step is the code between two
/// shared-memory accesses; every DetAtomic operation is a scheduling point. Only one
/// body runs at any moment, so a run is fully described by its choice sequence.
class DetSchedule {
public:
    /// Picks the index (in [0, n)) of the next body to run among the n runnable ones.
    using Chooser = std::function<std::size_t(std::size_t n)>;

    /// Rethrows the first exception raised by any body once all bodies finished.
    static void run(std::vector<std::function<void()>> bodies, const Chooser& choose);

    /// Scheduling point; a no-op outside DetSchedule::run.
    static void before_access();
};

/// Depth-first enumeration of every choice sequence DetSchedule can make.
/// `make_bodies` is called once per schedule and must rebuild all state fresh;
/// `check` runs after each schedule. Returns the number of schedules explored.
std::size_t enumerate_schedules(
    const std::function<std::vector<std::function<void()>>()>& make_bodies,
    const std::function<void()>& check, std::size_t limit = 10'000'000);

/// std::atomic look-alike whose every access is a DetSchedule step.
template <class T>
class DetAtomic {
public:
    DetAtomic() noexcept = default;
    constexpr DetAtomic(T v) noexcept : v_(v) {}

    T load(std::memory_order mo = std::memory_order_seq_cst) const {
        DetSchedule::before_access();
        return v_.load(mo);
    }
    void store(T v, std::memory_order mo = std::memory_order_seq_cst) {
        DetSchedule::before_access();
        v_.store(v, mo);
    }
    T exchange(T v, std::memory_order mo = std::memory_order_seq_cst) {
        DetSchedule::before_access();
        return v_.exchange(v, mo);
    }
    bool compare_exchange_strong(T& expected, T desired,
                                 std::memory_order s = std::memory_order_seq_cst,
                                 std::memory_order f = std::memory_order_seq_cst) {
        DetSchedule::before_access();
        return v_.compare_exchange_strong(expected, desired, s, f);
    }
    // Weak CAS never fails spuriously here; enumeration stays finite.
    bool compare_exchange_weak(T& expected, T desired,
                               std::memory_order s = std::memory_order_seq_cst,
                               std::memory_order f = std::memory_order_seq_cst) {
        return compare_exchange_strong(expected, desired, s, f);
    }
    T fetch_add(T d, std::memory_order mo = std::memory_order_seq_cst) {
        DetSchedule::before_access();
        return v_.fetch_add(d, mo);
    }
    T fetch_sub(T d, std::memory_order mo = std::memory_order_seq_cst) {
        DetSchedule::before_access();
        return v_.fetch_sub(d, mo);
    }

private:
    std::atomic<T> v_{};
};

}  // namespace sfj
