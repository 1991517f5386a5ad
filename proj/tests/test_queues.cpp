#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <deque>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "sfj/errors.hpp"
#include "sfj/queues/chase_lev.hpp"
#include "sfj/queues/global_queue.hpp"
#include "sfj/queues/warp_deque.hpp"
#include "support/queue_interleavings.hpp"

using namespace sfj;
using sfj::testing::item;

namespace {

std::vector<TaskId> items(std::uint32_t from, std::uint32_t to) {
    std::vector<TaskId> v;
    for (std::uint32_t i = from; i < to; ++i) v.push_back(item(i));
    return v;
}

}  // namespace

TEST_CASE("warp deque push publishes count and tail") {
    WarpDeque q(64);
    QueueCounters ctr;
    q.push_batch(items(0, 3), &ctr);
    CHECK(q.available() == 3);
    CHECK(q.tail() == 3);
    q.push_batch({}, &ctr);
    CHECK(q.available() == 3);
    CHECK(ctr.push_ops == 1);
    CHECK(ctr.pushed_tasks == 3);
}

TEST_CASE("warp deque overflow carries capacity") {
    WarpDeque q(4);
    q.push_batch(items(0, 3));
    try {
        q.push_batch(items(3, 5));
        FAIL("expected overflow");
    } catch (const QueueOverflow& e) {
        CHECK(e.capacity() == 4);
    }
}

TEST_CASE("warp deque pop claims up to max from the tail") {
    WarpDeque q(64);
    q.push_batch(items(0, 40));
    std::vector<TaskId> out;
    CHECK(q.pop_batch(32, out) == 32);
    CHECK(q.available() == 8);
    CHECK(out.front().index == 39);
    CHECK(out.back().index == 8);
    out.clear();
    CHECK(q.pop_batch(32, out) == 8);
    out.clear();
    CHECK(q.pop_batch(32, out) == 0);
    CHECK(out.empty());
}

TEST_CASE("warp deque steal takes the oldest entries") {
    WarpDeque q(64);
    q.push_batch(items(0, 40));
    std::vector<TaskId> out;
    QueueCounters ctr;
    CHECK(q.steal_batch(32, out, &ctr) == 32);
    CHECK(out.front().index == 0);
    CHECK(out.back().index == 31);
    CHECK(q.head() == 32);
    CHECK(ctr.lock_acquisitions == 1);
    CHECK(ctr.claims == 1);
}

TEST_CASE("warp deque matches a reference deque on random single-threaded traces") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(seed);
        WarpDeque q(16);
        std::deque<std::uint32_t> ref;
        std::uint32_t next = 0;
        for (int step = 0; step < 300; ++step) {
            const int op = static_cast<int>(rng() % 3);
            if (op == 0) {
                std::uint32_t n = static_cast<std::uint32_t>(rng() % 5);
                if (ref.size() + n > 16) continue;
                q.push_batch(items(next, next + n));
                for (std::uint32_t i = 0; i < n; ++i) ref.push_back(next + i);
                next += n;
            } else {
                std::size_t max = 1 + rng() % 6;
                std::vector<TaskId> out;
                std::vector<std::uint32_t> expect;
                if (op == 1) {
                    q.pop_batch(max, out);
                    while (expect.size() < max && !ref.empty()) {
                        expect.push_back(ref.back());
                        ref.pop_back();
                    }
                } else {
                    q.steal_batch(max, out);
                    while (expect.size() < max && !ref.empty()) {
                        expect.push_back(ref.front());
                        ref.pop_front();
                    }
                }
                std::vector<std::uint32_t> got;
                for (TaskId t : out) got.push_back(t.index);
                REQUIRE(got == expect);
            }
            REQUIRE(q.available() == static_cast<std::int64_t>(ref.size()));
        }
    }
}

TEST_CASE("warp deque: every owner/thief interleaving on 5 entries is safe") {
    auto r = sfj::testing::warp_deque_pop_vs_steal(5, 3, 3);
    CHECK(r.schedules > 100);
    CHECK_MESSAGE(r.violations == 0, r.first_violation);
}

TEST_CASE("warp deque: concurrent pop(3) and steal(2) split 5 entries") {
    auto r = sfj::testing::warp_deque_pop_vs_steal(5, 3, 2);
    CHECK_MESSAGE(r.violations == 0, r.first_violation);
}

TEST_CASE("warp deque: steals racing pushes never read unpublished slots") {
    auto r = sfj::testing::warp_deque_push_vs_steal(3, 2);
    CHECK(r.schedules > 10);
    CHECK_MESSAGE(r.violations == 0, r.first_violation);
}

TEST_CASE("warp deque: held lock makes steal return nothing") {
    // Two thieves: whenever one holds the lock the other's attempt fails fast.
    using Deque = BasicWarpDeque<DetAtomic>;
    std::shared_ptr<Deque> q;
    std::vector<TaskId> a, b;
    QueueCounters ca, cb;
    std::size_t lock_failures = 0, schedules = 0, bad = 0;
    enumerate_schedules(
        [&] {
            q = std::make_shared<Deque>(8);
            a.clear();
            b.clear();
            ca = {};
            cb = {};
            q->push_batch(items(0, 2));
            return std::vector<std::function<void()>>{[&] { q->steal_batch(1, a, &ca); },
                                                      [&] { q->steal_batch(1, b, &cb); }};
        },
        [&] {
            ++schedules;
            lock_failures += ca.lock_failures + cb.lock_failures;
            if (a.size() + b.size() + static_cast<std::size_t>(q->available()) != 2) ++bad;
            if (!a.empty() && !b.empty() && a[0] == b[0]) ++bad;
        });
    CHECK(bad == 0);
    CHECK(lock_failures > 0);
    CHECK(schedules > 2);
}

TEST_CASE("warp deque threaded stress: exactly-once fetch") {
    WarpDeque q(1 << 12);
    constexpr int kTotal = 200000;
    std::atomic<bool> done{false};
    std::vector<std::vector<TaskId>> stolen(3);
    std::vector<TaskId> popped;
    std::vector<std::thread> thieves;
    for (int t = 0; t < 3; ++t) {
        thieves.emplace_back([&, t] {
            while (!done.load()) q.steal_batch(8, stolen[t]);
        });
    }
    std::uint32_t next = 0;
    while (next < kTotal) {
        std::uint32_t n = std::min<std::uint32_t>(32, kTotal - next);
        if (q.tail() - q.head() + n <= static_cast<std::int64_t>(q.capacity())) {
            q.push_batch(items(next, next + n));
            next += n;
        }
        if (next % 96 == 0) q.pop_batch(16, popped);
    }
    while (q.available() > 0) q.pop_batch(32, popped);
    done = true;
    for (auto& th : thieves) th.join();
    std::vector<std::uint32_t> all;
    for (TaskId t : popped) all.push_back(t.index);
    for (auto& s : stolen) for (TaskId t : s) all.push_back(t.index);
    std::sort(all.begin(), all.end());
    CHECK(all.size() == kTotal);
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("chase-lev owner LIFO, thief FIFO") {
    ChaseLevDeque q(4);
    q.push(item(1));
    q.push(item(2));
    CHECK(q.pop()->index == 2);
    q.push(item(3));
    CHECK(q.steal()->index == 1);
    CHECK(q.pop()->index == 3);
    CHECK_FALSE(q.pop().has_value());
    CHECK_FALSE(q.steal().has_value());
    for (std::uint32_t i = 0; i < 4; ++i) q.push(item(i));
    CHECK_THROWS_AS(q.push(item(9)), QueueOverflow);
}

TEST_CASE("chase-lev last element race resolves to one winner") {
    auto r = sfj::testing::chase_lev_last_element_race();
    CHECK(r.schedules > 2);
    CHECK_MESSAGE(r.violations == 0, r.first_violation);
}

TEST_CASE("sequential chase-lev pops one element per operation") {
    ChaseLevDeque q(64);
    for (std::uint32_t i = 0; i < 40; ++i) q.push(item(i));
    QueueCounters ctr;
    std::vector<TaskId> out;
    CHECK(q.pop_sequential(32, out, &ctr) == 32);
    CHECK(ctr.pop_attempts == 32);
    CHECK(out.front().index == 39);

    ChaseLevDeque empty(4);
    QueueCounters ce;
    out.clear();
    CHECK(empty.steal_sequential(32, out, &ce) == 0);
    CHECK(ce.steal_attempts == 1);
}

TEST_CASE("sequential variant needs more sync ops per task than batched on one trace") {
    WarpDeque wq(256);
    ChaseLevDeque cq(256);
    QueueCounters cw, cc;
    std::mt19937_64 rng(3);
    std::vector<TaskId> ow, oc;
    std::uint32_t next = 0;
    for (int step = 0; step < 500; ++step) {
        std::uint32_t n = static_cast<std::uint32_t>(rng() % 40);
        if (wq.available() + n < 200) {
            auto batch = items(next, next + n);
            next += n;
            wq.push_batch(batch, &cw);
            for (TaskId t : batch) cq.push(t, &cc);
        }
        bool steal = rng() % 4 == 0;
        if (steal) {
            wq.steal_batch(32, ow, &cw);
            cq.steal_sequential(32, oc, &cc);
        } else {
            wq.pop_batch(32, ow, &cw);
            cq.pop_sequential(32, oc, &cc);
        }
    }
    REQUIRE(ow.size() == oc.size());
    const double per_batched = double(cw.sync_ops()) / double(cw.acquired_tasks());
    const double per_seq = double(cc.sync_ops()) / double(cc.acquired_tasks());
    CHECK(per_seq >= per_batched);
}

TEST_CASE("global queue is FIFO and conserves ids") {
    GlobalQueue g(64);
    QueueCounters c0, c1;
    g.enqueue(items(0, 5), &c0);
    g.enqueue(items(5, 9), &c1);
    std::vector<TaskId> a, b;
    g.dequeue(6, a, &c0);
    g.dequeue(6, b, &c1);
    CHECK(a.size() == 6);
    CHECK(b.size() == 3);
    for (std::uint32_t i = 0; i < 6; ++i) CHECK(a[i].index == i);
    CHECK(b[0].index == 6);
    std::vector<TaskId> none;
    CHECK(g.dequeue(4, none, &c0) == 0);
    CHECK(c0.lock_acquisitions == 3);
    CHECK(c1.lock_acquisitions == 2);
    CHECK_THROWS_AS(g.enqueue(items(0, 65)), QueueOverflow);
}
