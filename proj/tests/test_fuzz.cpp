#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "fuzz_programs.hpp"
#include "sfj/runtime.hpp"
#include "sfj/taskc/compiler.hpp"
#include "sfj/taskc/interp.hpp"

using namespace sfj;

namespace {

RuntimeConfig fuzz_config(std::uint64_t i, int num_queues) {
    RuntimeConfig c;
    c.num_queues = num_queues;
    c.seed = 100 + i;
    c.grid_size = 1 + static_cast<int>(i % 4) * 3;
    c.warp_size = (i % 3 == 0) ? 1 : 8;
    c.block_size = c.warp_size;
    c.scheduler = (i % 5 == 4) ? SchedulerKind::global_queue : SchedulerKind::work_stealing;
    c.queue_alg = (i % 7 == 3) ? QueueAlg::sequential_chase_lev : QueueAlg::batched;
    c.engine = (i % 10 == 9) ? EngineKind::concurrent : EngineKind::deterministic;
    c.max_tasks_per_warp = 1 << 15;
    return c;
}

}  // namespace

TEST_CASE("generated programs agree with the reference evaluator") {
    int checked = 0;
    int with_taskwait = 0;
    int nontrivial = 0;
    for (std::uint64_t i = 0; i < 240; ++i) {
        const int nq = 1 + static_cast<int>(i % 3);
        fuzz::Generator gen(i * 7919 + 1);
        const auto fp = gen.make(nq);
        CAPTURE(i);
        CAPTURE(fp.source);

        const auto compiled = taskc::compile(fp.source);
        auto ir = std::make_shared<taskc::IrProgram>(compiled.ir);
        TaskRegistry registry(ir);
        const FnId root = registry.id(fp.root);
        for (const auto& f : ir->functions) {
            if (f.is_task && f.num_states() > 1) {
                ++with_taskwait;
                break;
            }
        }

        BufferStore expect_bufs;
        fuzz::fill_buffers(expect_bufs, i);
        const Value expect = taskc::reference_run(compiled.ast, root, fp.root_args, expect_bufs);

        BufferStore bufs;
        fuzz::fill_buffers(bufs, i);
        const RuntimeConfig cfg = fuzz_config(i, nq);
        const RunReport r = run(registry, {root, fp.root_args, 0}, cfg, bufs);
        CHECK(r.root_result == expect);
        CHECK(r.outstanding_at_exit == 0);
        CHECK(bufs.data("acc") == expect_bufs.data("acc"));
        if (r.tasks_allocated >= 5) ++nontrivial;
        ++checked;
    }
    CHECK(checked >= 200);
    CHECK(with_taskwait >= 100);
    CHECK(nontrivial >= 120);
}
