#pragma once

// Exhaustive owner/thief interleaving checks shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sfj/queues/chase_lev.hpp"
#include "sfj/queues/det_schedule.hpp"
#include "sfj/queues/warp_deque.hpp"

namespace sfj::testing {

struct InterleavingSummary {
    std::size_t schedules = 0;
    std::size_t violations = 0;
    std::string first_violation;
};

inline constexpr std::uint32_t kCanaryIndex = 0xDEADBEEF;

inline TaskId item(std::uint32_t i) { return TaskId{i, 7}; }

/// One owner popping up to `pop_max` and one thief stealing up to `steal_max` from a
/// deque that already holds `n` published entries. Checks that claims are disjoint,
/// together cover everything that left the deque, and never read an uninitialized slot.
inline InterleavingSummary warp_deque_pop_vs_steal(int n, int pop_max, int steal_max) {
    using Deque = BasicWarpDeque<DetAtomic>;
    InterleavingSummary sum;
    std::shared_ptr<Deque> q;
    std::vector<TaskId> popped, stolen;
    auto make = [&] {
        q = std::make_shared<Deque>(8, TaskId{kCanaryIndex, 0});
        popped.clear();
        stolen.clear();
        std::vector<TaskId> init;
        for (int i = 0; i < n; ++i) init.push_back(item(static_cast<std::uint32_t>(i)));
        q->push_batch(init);
        return std::vector<std::function<void()>>{
            [&] { q->pop_batch(static_cast<std::size_t>(pop_max), popped); },
            [&] { q->steal_batch(static_cast<std::size_t>(steal_max), stolen); }};
    };
    auto check = [&] {
        std::vector<std::uint32_t> seen;
        bool bad = false;
        std::string why;
        for (TaskId t : popped) seen.push_back(t.index);
        for (TaskId t : stolen) seen.push_back(t.index);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            bad = true;
            why = "claimed twice";
        }
        for (std::uint32_t s : seen) {
            if (s >= static_cast<std::uint32_t>(n)) {
                bad = true;
                why = "read an unpublished slot";
            }
        }
        const std::int64_t left = q->available();
        if (static_cast<std::int64_t>(seen.size()) + left != n) {
            bad = true;
            why = "claims and residue do not cover the pushed set";
        }
        // Owner takes from the tail end, the thief from the head end.
        for (std::size_t i = 0; i < stolen.size(); ++i) {
            if (stolen[i].index != i) {
                bad = true;
                why = "steal not from the head end";
            }
        }
        for (std::size_t i = 0; i < popped.size(); ++i) {
            if (popped[i].index != static_cast<std::uint32_t>(n - 1 - static_cast<int>(i))) {
                bad = true;
                why = "pop not from the tail end";
            }
        }
        const bool expect_all = pop_max + steal_max >= n;
        if (expect_all && left != 0) {
            bad = true;
            why = "entries left although both sides could claim them";
        }
        ++sum.schedules;
        if (bad) {
            if (sum.violations == 0) sum.first_violation = why;
            ++sum.violations;
        }
    };
    enumerate_schedules(make, check);
    return sum;
}

/// Owner publishes `n` entries in two batches and then pops, while a thief steals.
/// Unwritten slots hold a canary id; reading one is a publication violation.
inline InterleavingSummary warp_deque_push_vs_steal(int n, int steal_max) {
    using Deque = BasicWarpDeque<DetAtomic>;
    InterleavingSummary sum;
    std::shared_ptr<Deque> q;
    std::vector<TaskId> popped, stolen;
    auto make = [&] {
        q = std::make_shared<Deque>(8, TaskId{kCanaryIndex, 0});
        popped.clear();
        stolen.clear();
        return std::vector<std::function<void()>>{
            [&] {
                std::vector<TaskId> a, b;
                for (int i = 0; i < n; ++i) {
                    (i < n / 2 ? a : b).push_back(item(static_cast<std::uint32_t>(i)));
                }
                q->push_batch(a);
                q->push_batch(b);
                q->pop_batch(static_cast<std::size_t>(n), popped);
            },
            [&] { q->steal_batch(static_cast<std::size_t>(steal_max), stolen); }};
    };
    auto check = [&] {
        std::vector<std::uint32_t> seen;
        for (TaskId t : popped) seen.push_back(t.index);
        for (TaskId t : stolen) seen.push_back(t.index);
        std::sort(seen.begin(), seen.end());
        std::string why;
        if (std::find(seen.begin(), seen.end(), kCanaryIndex) != seen.end()) {
            why = "read an unpublished slot";
        } else if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            why = "claimed twice";
        } else if (static_cast<int>(seen.size()) != n) {
            why = "lost entries";
        }
        ++sum.schedules;
        if (!why.empty()) {
            if (sum.violations == 0) sum.first_violation = why;
            ++sum.violations;
        }
    };
    enumerate_schedules(make, check);
    return sum;
}

/// Single-element Chase-Lev race: exactly one of pop and steal obtains the element.
inline InterleavingSummary chase_lev_last_element_race() {
    using Deque = BasicChaseLevDeque<DetAtomic>;
    InterleavingSummary sum;
    std::shared_ptr<Deque> q;
    std::optional<TaskId> a, b;
    auto make = [&] {
        q = std::make_shared<Deque>(4);
        a.reset();
        b.reset();
        q->push(item(0));
        return std::vector<std::function<void()>>{[&] { a = q->pop(); },
                                                  [&] { b = q->steal(); }};
    };
    auto check = [&] {
        ++sum.schedules;
        const int got = (a ? 1 : 0) + (b ? 1 : 0);
        if (got != 1 || q->size() != 0) {
            if (sum.violations == 0) sum.first_violation = "last element not taken exactly once";
            ++sum.violations;
        }
    };
    enumerate_schedules(make, check);
    return sum;
}

}  // namespace sfj::testing
