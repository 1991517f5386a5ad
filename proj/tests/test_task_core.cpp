#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "sfj/errors.hpp"
#include "sfj/task_core.hpp"

using namespace sfj;

namespace {

RuntimeConfig small_config() {
    RuntimeConfig c;
    c.grid_size = 1;
    c.block_size = 32;
    c.warp_size = 32;
    c.max_tasks_per_warp = 64;
    c.max_child_tasks = 4;
    c.instrument = true;
    return c;
}

Value args1[] = {40};

}  // namespace

TEST_CASE("pool capacity follows topology") {
    RuntimeConfig c;
    c.grid_size = 2;
    c.block_size = 64;
    c.warp_size = 32;
    c.max_tasks_per_warp = 8;
    TaskPool pool(c);
    CHECK(pool.capacity() == 32);
    CHECK(pool.num_free_lists() == 4);
    CHECK(pool.outstanding() == 0);
}

TEST_CASE("fib setting has one free list per warp") {
    RuntimeConfig c;
    c.grid_size = 4000;
    c.block_size = 32;
    c.warp_size = 32;
    c.max_tasks_per_warp = 16;
    TaskPool pool(c);
    CHECK(pool.num_free_lists() == 4000);
}

TEST_CASE("zero capacity is a configuration error") {
    RuntimeConfig c;
    c.max_tasks_per_warp = 0;
    CHECK_THROWS_AS(TaskPool{c}, ConfigError);
    c = RuntimeConfig{};
    c.block_size = 48;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RuntimeConfig{};
    c.grid_size = 1 << 20;
    c.block_size = 1024;
    c.max_tasks_per_warp = 1 << 20;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("alloc copies args and starts at state 0") {
    TaskPool pool(small_config(), {1});
    TaskId t = pool.alloc(0, 0, args1);
    CHECK(pool.state(t) == 0);
    CHECK(pool.data(t)[0] == 40);
    CHECK(pool.join_counter(t) == 0);
    CHECK(pool.outstanding() == 1);
    CHECK_FALSE(pool.parent(t).has_value());
}

TEST_CASE("arity mismatch is a usage error") {
    TaskPool pool(small_config(), {2});
    CHECK_THROWS_AS(pool.alloc(0, 0, args1), UsageError);
}

TEST_CASE("slot reuse bumps the generation") {
    RuntimeConfig c = small_config();
    c.max_tasks_per_warp = 1;
    TaskPool pool(c);
    TaskId a = pool.alloc(0, 0, args1);
    CHECK(a.generation == 0);
    pool.finish(a, 0, 0);
    TaskId b = pool.alloc(0, 0, args1);
    CHECK(b.index == a.index);
    CHECK(b.generation == 1);
    CHECK_FALSE(pool.is_valid(a));
    CHECK_THROWS_AS(pool.begin_epoch(a), InvalidHandle);
}

TEST_CASE("exhaustion reports the capacity") {
    RuntimeConfig c = small_config();
    c.max_tasks_per_warp = 4;
    TaskPool pool(c);
    for (int i = 0; i < 4; ++i) pool.alloc(0, 0, args1);
    try {
        pool.alloc(0, 0, args1);
        FAIL("expected PoolExhausted");
    } catch (const PoolExhausted& e) {
        CHECK(e.capacity() == 4);
    }
}

TEST_CASE("join counter protocol") {
    TaskPool pool(small_config());
    TaskId p = pool.alloc(0, 0, args1);
    pool.begin_epoch(p);
    CHECK(pool.join_counter(p) == 1);

    SUBCASE("two children, last finisher resumes parent") {
        int o0 = pool.register_child(p);
        int o1 = pool.register_child(p);
        CHECK(o0 == 0);
        CHECK(o1 == 1);
        CHECK(pool.join_counter(p) == 3);
        TaskId c0 = pool.alloc(0, 0, args1, p, o0);
        TaskId c1 = pool.alloc(0, 0, args1, p, o1);
        CHECK(pool.suspend(p, 1, 2).resume == false);
        CHECK(pool.state(p) == 1);
        CHECK(pool.finish(c0, 1, 0).resume == false);
        CHECK(pool.join_counter(p) == 1);
        JoinOutcome j = pool.finish(c1, 1, 0);
        CHECK(j.resume);
        CHECK(j.task == p);
        CHECK(j.resume_queue == 2);
        CHECK(pool.load_result(p, 0) == 1);
        CHECK(pool.load_result(p, 1) == 1);
        CHECK_THROWS_AS(pool.load_result(p, 2), UsageError);

        pool.begin_epoch(p);
        CHECK(pool.join_counter(p) == 1);
        CHECK(pool.load_result(p, 1) == 1);
    }
    SUBCASE("children done before suspend") {
        int o = pool.register_child(p);
        TaskId c = pool.alloc(0, 0, args1, p, o);
        CHECK_FALSE(pool.finish(c, 7, 0).resume);
        JoinOutcome j = pool.suspend(p, 1, 0);
        CHECK(j.resume);
        CHECK(j.task == p);
        CHECK(pool.load_result(p, 0) == 7);
    }
    SUBCASE("empty join resumes immediately") {
        CHECK(pool.join_counter(p) == 1);
        CHECK(pool.suspend(p, 1, 0).resume);
        CHECK_THROWS_AS(pool.load_result(p, 0), UsageError);
    }
    SUBCASE("child limit") {
        for (int i = 0; i < 4; ++i) pool.register_child(p);
        CHECK_THROWS_AS(pool.register_child(p), ChildLimitExceeded);
    }
    SUBCASE("state must advance") {
        pool.suspend(p, 1, 0);
        pool.begin_epoch(p);
        CHECK_THROWS_AS(pool.suspend(p, 1, 0), UsageError);
    }
}

TEST_CASE("root finish records the result and drains the counter") {
    TaskPool pool(small_config());
    TaskId r = pool.alloc(0, 0, args1);
    pool.begin_epoch(r);
    CHECK_FALSE(pool.finish(r, 55, 0).resume);
    CHECK(pool.root_finished());
    CHECK(pool.root_result() == 55);
    CHECK(pool.outstanding() == 0);
    CHECK_THROWS_AS(pool.finish(r, 55, 0), InvalidHandle);
}

TEST_CASE("assume_no_taskwait leaves join metadata untouched") {
    RuntimeConfig c = small_config();
    c.assume_no_taskwait = true;
    TaskPool pool(c);
    TaskId p = pool.alloc(0, 0, args1);
    pool.begin_epoch(p);
    TaskId ch = pool.alloc(0, 0, args1, p, 0);
    CHECK_FALSE(pool.finish(ch, 3, 0).resume);
    CHECK(pool.join_metadata_writes() == 0);
    CHECK_THROWS_AS(pool.load_result(p, 0), UsageError);
    CHECK_THROWS_AS(pool.suspend(p, 1, 0), UsageError);
    pool.finish(p, 0, 0);
    CHECK(pool.root_finished());
    CHECK(pool.outstanding() == 0);
}

TEST_CASE("cross-worker frees return to the home list") {
    RuntimeConfig c = small_config();
    c.block_size = 64;  // two warps
    c.max_tasks_per_warp = 8;
    TaskPool pool(c);
    std::vector<TaskId> mine;
    for (int i = 0; i < 6; ++i) mine.push_back(pool.alloc(0, 0, args1));
    for (TaskId t : mine) CHECK(pool.home_worker(t) == 0);
    for (TaskId t : mine) pool.finish(t, 0, 1);  // freed by the other worker
    std::set<std::uint32_t> again;
    for (int i = 0; i < 6; ++i) {
        TaskId t = pool.alloc(0, 0, args1);
        CHECK(pool.home_worker(t) == 0);
        again.insert(t.index);
    }
    CHECK(again.size() == 6);
}

TEST_CASE("seeded stress: each slot generation finishes exactly once") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RuntimeConfig c = small_config();
        c.block_size = 128;
        c.max_tasks_per_warp = 16;
        TaskPool pool(c);
        std::mt19937_64 rng(seed);
        std::vector<TaskId> live;
        std::uint64_t allocs = 0, finishes = 0;
        for (int step = 0; step < 2000; ++step) {
            bool do_alloc = live.empty() || (rng() % 2 == 0 && pool.outstanding() < 40);
            if (do_alloc) {
                live.push_back(pool.alloc(static_cast<int>(rng() % 4), 0, args1));
                ++allocs;
            } else {
                std::size_t k = rng() % live.size();
                pool.finish(live[k], 0, static_cast<int>(rng() % 4));
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
                ++finishes;
            }
            REQUIRE(pool.outstanding() == static_cast<std::int64_t>(allocs - finishes));
        }
        for (TaskId t : live) pool.finish(t, 0, 0);
        CHECK(pool.outstanding() == 0);
        for (std::uint32_t s = 0; s < pool.capacity(); ++s) {
            REQUIRE(pool.slot_allocs(s) == pool.slot_finishes(s));
        }
    }
}

TEST_CASE("finishing with unjoined children defers the slot release") {
    TaskPool pool(small_config());
    TaskId p = pool.alloc(0, 0, args1);
    pool.begin_epoch(p);
    int o = pool.register_child(p);
    TaskId c = pool.alloc(0, 0, args1, p, o);
    CHECK_FALSE(pool.finish(p, 9, 0).resume);
    CHECK(pool.root_result() == 9);
    CHECK(pool.is_valid(p));
    CHECK_THROWS_AS(pool.finish(p, 9, 0), InvalidHandle);
    CHECK(pool.outstanding() == 1);
    CHECK_FALSE(pool.finish(c, 1, 0).resume);
    CHECK_FALSE(pool.is_valid(p));
    CHECK(pool.outstanding() == 0);
}
