// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuzz_programs.hpp"
#include "sfj/bench.hpp"
#include "sfj/errors.hpp"
#include "sfj/runtime.hpp"
#include "sfj/taskc/compiler.hpp"
#include "sfj/taskc/interp.hpp"
#include "support/queue_interleavings.hpp"

using namespace sfj;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail.clear();
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

// Deterministic runs kept for the work/span bound check.
struct BoundSample {
    std::string label;
    std::int64_t makespan;
    std::int64_t work;
    std::int64_t span;
    std::int64_t lanes;
};
std::vector<BoundSample> g_bounds;

void remember(const std::string& label, const RunReport& r) {
    if (r.config.engine != EngineKind::deterministic) return;
    g_bounds.push_back({label, r.makespan, r.work_span.total_work, r.work_span.critical_path,
                        r.config.parallel_lanes()});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const std::string& rel) {
    std::ifstream in(std::string(SFJ_SOURCE_DIR) + "/" + rel, std::ios::binary);
    if (!in) throw Error("missing " + rel);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    struct Item {
        const char* name;
        std::int64_t n;
    };
    const std::vector<Item> items = {
        {"fib", 25}, {"nqueens", 8}, {"nqueens", 10}, {"mergesort", 100000}, {"cilksort", 100000}};
    int runs = 0, failures = 0;
    for (const auto& it : items) {
        for (EngineKind e : {EngineKind::deterministic, EngineKind::concurrent}) {
            for (SchedulerKind s : {SchedulerKind::work_stealing, SchedulerKind::global_queue}) {
                for (QueueAlg a : {QueueAlg::batched, QueueAlg::sequential_chase_lev}) {
                    for (int p : {1, 4, 16}) {
                        for (int nq : {1, 3}) {
                            bench::BenchSpec spec;
                            spec.name = it.name;
                            spec.n = it.n;
                            RuntimeConfig c;
                            bench::set_workers(c, p);
                            c.max_tasks_per_warp = std::max(4096, 262144 / p);
                            c.num_queues = nq;
                            c.engine = e;
                            c.scheduler = s;
                            c.queue_alg = a;
                            const std::string label = std::string(it.name) + "(" + std::to_string(it.n) +
                                                      ") " + std::string(to_string(e)) + " " +
                                                      std::string(to_string(s)) + " " +
                                                      std::string(to_string(a)) + " P=" + std::to_string(p) +
                                                      " nq=" + std::to_string(nq);
                            ++runs;
                            try {
                                const auto out = bench::run_bench(spec, c);
                                remember("c1 " + label, out.report);
                                if (!out.verdict.pass) {
                                    ++failures;
                                    o.fail(label + ": " + out.verdict.detail);
                                }
                            } catch (const std::exception& ex) {
                                ++failures;
                                o.fail(label + ": " + ex.what());
                            }
                        }
                    }
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 600) o.fail("matrix took " + fmt(dt) + " s");
    if (o.pass) {
        o.detail = std::to_string(runs) + " runs, 0 failures";
    } else {
        o.detail = std::to_string(failures) + " of " + std::to_string(runs) + " failed: " + o.detail;
    }
    return o;
}

Outcome criterion2() {
    Outcome o;
    int violations = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        bench::BenchSpec spec;
        spec.name = "fib";
        spec.n = 18;
        RuntimeConfig c;
        bench::set_workers(c, 16);
        c.seed = seed;
        const auto out = bench::run_bench(spec, c);
        const RunReport& r = out.report;
        remember("c2 seed " + std::to_string(seed), r);
        auto bad = [&](const std::string& why) {
            ++violations;
            o.fail("seed " + std::to_string(seed) + ": " + why);
        };
        if (!out.verdict.pass) bad(out.verdict.detail);
        if (r.outstanding_at_exit != 0) bad("outstanding " + std::to_string(r.outstanding_at_exit));

        // Each task's states are dispatched once each, as 0, 1, ..., k.
        std::map<std::uint64_t, std::vector<int>> states;
        std::map<std::pair<std::uint64_t, int>, std::uint64_t> seq_of;
        for (const auto& inv : r.invocations) {
            states[inv.task].push_back(inv.state);
            if (!seq_of.emplace(std::make_pair(inv.task, inv.state), inv.seq).second) {
                bad("state dispatched twice");
            }
        }
        if (states.size() != r.tasks_allocated) bad("some task never dispatched");
        for (auto& [task, st] : states) {
            std::sort(st.begin(), st.end());
            for (std::size_t i = 0; i < st.size(); ++i) {
                if (st[i] != static_cast<int>(i)) {
                    bad("task states not contiguous");
                    break;
                }
            }
        }
        // Continuations run after every child of the epoch that precedes them.
        std::map<std::uint64_t, std::uint64_t> last;
        for (const auto& inv : r.invocations) last[inv.task] = std::max(last[inv.task], inv.seq);
        for (const auto& inv : r.invocations) {
            if (!inv.has_parent) continue;
            const auto it = seq_of.find({inv.parent, inv.parent_state + 1});
            if (it != seq_of.end() && it->second <= last[inv.task]) bad("continuation before child");
        }
    }
    if (o.pass) o.detail = "100 seeds, 0 violations";
    else o.detail = std::to_string(violations) + " violations: " + o.detail.substr(0, 300);
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto r = sfj::testing::warp_deque_pop_vs_steal(5, 3, 3);
    if (r.violations != 0) o.fail(r.first_violation);
    if (r.schedules == 0) o.fail("no schedules enumerated");
    // Steals racing the owner's publication of entries (3 keeps the search short).
    const auto w = sfj::testing::warp_deque_push_vs_steal(3, 3);
    if (w.violations != 0) o.fail(w.first_violation);
    if (o.pass) {
        o.detail = std::to_string(r.schedules) + " pop/steal schedules and " +
                   std::to_string(w.schedules) + " push/steal schedules, 0 violations";
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    // Block-level ftree: each task is one block-cooperative invocation.
    auto config = [](Granularity g, SchedulerKind s, int p, EngineKind e) {
        RuntimeConfig c;
        c.granularity = g;
        if (g == Granularity::block_level) c.block_size = 64;
        bench::set_workers(c, p);
        c.max_tasks_per_warp = c.max_tasks_per_block = std::max(4096, 262144 / p);
        c.scheduler = s;
        c.engine = e;
        return c;
    };
    bench::BenchSpec spec;
    spec.name = "ftree";
    spec.n = 16;
    spec.compute_iters = 128;
    std::map<std::pair<SchedulerKind, int>, std::int64_t> mk;
    for (SchedulerKind s : {SchedulerKind::work_stealing, SchedulerKind::global_queue}) {
        for (int p : {1, 2, 4, 8, 16}) {
            const auto out = bench::run_bench(spec, config(Granularity::block_level, s, p,
                                                           EngineKind::deterministic));
            remember("c4 " + std::string(to_string(s)) + " P=" + std::to_string(p), out.report);
            if (!out.verdict.pass) o.fail(out.verdict.detail);
            mk[{s, p}] = out.report.makespan;
        }
    }
    const auto ws = SchedulerKind::work_stealing;
    const auto gq = SchedulerKind::global_queue;
    const double ratio = double(mk[{ws, 4}]) / double(mk[{ws, 1}]);
    if (mk[{ws, 16}] > mk[{gq, 16}]) o.fail("WS P=16 slower than GQ");
    if (ratio > 0.35) o.fail("WS P=4/P=1 = " + fmt(ratio));
    std::string d = "block-level: WS/GQ makespan at P=16 " + std::to_string(mk[{ws, 16}]) + "/" +
                    std::to_string(mk[{gq, 16}]) + ", WS P=4/P=1 " + fmt(ratio);

    // Not gating: the same tree at thread granularity.
    std::map<SchedulerKind, std::int64_t> thread_mk;
    for (SchedulerKind s : {ws, gq}) {
        const auto out = bench::run_bench(
            spec, config(Granularity::thread_level, s, 16, EngineKind::deterministic));
        thread_mk[s] = out.report.makespan;
    }
    d += "; info, thread-level WS/GQ at P=16 " + std::to_string(thread_mk[ws]) + "/" +
         std::to_string(thread_mk[gq]);

    // Not gating: concurrent-engine wall-clock medians over 10 repetitions.
    std::string wall;
    for (SchedulerKind s : {ws, gq}) {
        for (int p : {1, 16}) {
            std::vector<double> t;
            for (int rep = 0; rep < 10; ++rep) {
                RuntimeConfig c = config(Granularity::block_level, s, p, EngineKind::concurrent);
                c.seed = 1 + static_cast<std::uint64_t>(rep);
                c.record_invocations = false;
                const auto out = bench::run_bench(spec, c);
                t.push_back(out.report.wall_seconds);
            }
            std::sort(t.begin(), t.end());
            wall += std::string(wall.empty() ? "" : ", ") + std::string(to_string(s)) + " P=" +
                    std::to_string(p) + " " + fmt((t[4] + t[5]) / 2) + " s";
        }
    }
    d += "; info, concurrent wall medians " + wall;
    if (o.pass) o.detail = d;
    else o.detail += " (" + d + ")";
    return o;
}

Outcome criterion5() {
    Outcome o;
    double ratio[2] = {0, 0};
    for (QueueAlg a : {QueueAlg::batched, QueueAlg::sequential_chase_lev}) {
        bench::BenchSpec spec;
        spec.name = "fib";
        spec.n = 22;
        RuntimeConfig c;
        bench::set_workers(c, 4);
        c.queue_alg = a;
        const auto out = bench::run_bench(spec, c);
        remember("c5 " + std::string(to_string(a)), out.report);
        if (!out.verdict.pass) o.fail(out.verdict.detail);
        const auto& q = out.report.queues;
        ratio[a == QueueAlg::batched ? 0 : 1] = double(q.sync_ops()) / double(q.acquired_tasks());
    }
    const std::string d = "sync ops per acquired task: batched " + fmt(ratio[0]) + ", sequential " +
                          fmt(ratio[1]) + ", ratio " + fmt(ratio[0] / ratio[1]);
    if (ratio[0] > 0.25 * ratio[1]) o.fail(d);
    else o.detail = d;
    return o;
}

Outcome criterion6() {
    Outcome o;
    RunReport r[2];
    for (int i = 0; i < 2; ++i) {
        bench::BenchSpec spec;
        spec.name = "fib";
        spec.n = 28;
        spec.cutoff = 10;
        RuntimeConfig c;
        bench::set_workers(c, 16);
        c.num_queues = i == 0 ? 1 : 3;
        c.epaq_pure_keep = true;
        const auto out = bench::run_bench(spec, c);
        remember("c6 nq=" + std::to_string(c.num_queues), out.report);
        if (!out.verdict.pass) o.fail(out.verdict.detail);
        r[i] = out.report;
    }
    const double d1 = r[0].divergence.mean_distinct_paths;
    const double d3 = r[1].divergence.mean_distinct_paths;
    const double reduction = 1.0 - d3 / d1;
    const double slowdown = double(r[1].makespan) / double(r[0].makespan);
    const std::string d = "mean distinct paths " + fmt(d1) + " -> " + fmt(d3) + " (" +
                          fmt(100 * reduction) + "% fewer), makespan " +
                          std::to_string(r[0].makespan) + " -> " + std::to_string(r[1].makespan);
    if (reduction < 0.20) o.fail("reduction below 20%");
    if (slowdown > 1.05) o.fail("makespan worse by more than 5%");
    if (r[0].root_result != r[1].root_result) o.fail("root results differ");
    if (o.pass) o.detail = d;
    else o.detail += " (" + d + ")";
    return o;
}

Outcome criterion7() {
    Outcome o;
    using namespace sfj::taskc;
    const auto fib = compile_program(read_file("tests/golden/fib.gt"));
    const IrFunction& f = fib.functions[fib.find_function("fib")];
    if (f.num_states() != 2) o.fail("fib has " + std::to_string(f.num_states()) + " states");
    std::vector<std::string> fields;
    for (const auto& fl : f.layout.fields) fields.push_back(fl.name);
    if (fields != std::vector<std::string>{"n", "a", "b", "result"}) o.fail("fib layout fields differ");
    std::vector<int> loads;
    if (f.num_states() == 2) {
        for (const Instr& i : f.blocks[f.state_entry[1]].code) {
            if (i.op == Opcode::load_result) loads.push_back(i.ordinal);
        }
    }
    if (loads != std::vector<int>{0, 1}) o.fail("fib state 1 does not load results 0 and 1");

    const auto ms = compile_program(read_file("tests/golden/mergesort.gt"));
    const IrFunction& m = ms.functions[ms.find_function("mergesort")];
    const int merge = ms.find_function("merge");
    if (m.num_states() != 2) o.fail("mergesort has " + std::to_string(m.num_states()) + " states");
    bool merge_in_1 = false;
    if (m.num_states() == 2) {
        for (const Instr& i : m.blocks[m.state_entry[1]].code) {
            merge_in_1 = merge_in_1 || (i.op == Opcode::call && i.callee == merge);
        }
    }
    if (!merge_in_1) o.fail("mergesort state 1 does not call merge");

    for (const char* name : {"fib", "mergesort"}) {
        const std::string src = read_file(std::string("tests/golden/") + name + ".gt");
        const std::string a = print_program(compile_program(src));
        if (a != print_program(compile_program(src))) o.fail(std::string(name) + " IR not stable");
        if (a != read_file(std::string("tests/golden/") + name + ".ir")) {
            o.fail(std::string(name) + " IR differs from golden");
        }
    }
    if (o.pass) o.detail = "fib 2 states {n, a, b, result}; mergesort 2 states, merge in state 1; IR matches goldens";
    return o;
}

Outcome criterion8() {
    Outcome o;
    int programs = 0, mismatches = 0;
    for (std::uint64_t i = 0; i < 240; ++i) {
        const int nq = 1 + static_cast<int>(i % 3);
        fuzz::Generator gen(i * 7919 + 1);
        const auto fp = gen.make(nq);
        try {
            const auto compiled = taskc::compile(fp.source);
            auto ir = std::make_shared<taskc::IrProgram>(compiled.ir);
            TaskRegistry registry(ir);
            const FnId root = registry.id(fp.root);
            BufferStore expect_bufs;
            fuzz::fill_buffers(expect_bufs, i);
            const Value expect = taskc::reference_run(compiled.ast, root, fp.root_args, expect_bufs);
            BufferStore bufs;
            fuzz::fill_buffers(bufs, i);
            RuntimeConfig c;
            c.num_queues = nq;
            c.seed = 100 + i;
            c.grid_size = 1 + static_cast<int>(i % 4) * 3;
            c.warp_size = c.block_size = (i % 3 == 0) ? 1 : 8;
            c.scheduler = (i % 5 == 4) ? SchedulerKind::global_queue : SchedulerKind::work_stealing;
            c.queue_alg = (i % 7 == 3) ? QueueAlg::sequential_chase_lev : QueueAlg::batched;
            c.engine = (i % 10 == 9) ? EngineKind::concurrent : EngineKind::deterministic;
            c.max_tasks_per_warp = 1 << 15;
            const auto r = run(registry, {root, fp.root_args, 0}, c, bufs);
            if (r.root_result != expect || bufs.data("acc") != expect_bufs.data("acc") ||
                r.outstanding_at_exit != 0) {
                ++mismatches;
                o.fail("program " + std::to_string(i) + " differs");
            }
        } catch (const std::exception& ex) {
            ++mismatches;
            o.fail("program " + std::to_string(i) + ": " + ex.what());
        }
        ++programs;
    }

    std::mt19937_64 rng(2024);
    int cfgs = 0, wrong = 0;
    for (int iter = 0; iter < 500; ++iter, ++cfgs) {
        const int nb = 2 + static_cast<int>(rng() % 11);
        const int nv = 1 + static_cast<int>(rng() % 6);
        taskc::LivenessProblem p;
        p.num_vars = nv;
        p.succs.assign(nb, {});
        p.use.assign(nb, taskc::VarSet(nv));
        p.def.assign(nb, taskc::VarSet(nv));
        for (int b = 0; b < nb - 1; ++b) {
            const int outs = 1 + static_cast<int>(rng() % 2);
            for (int k = 0; k < outs; ++k) {
                const int s = b + 1 + static_cast<int>(rng() % (nb - b - 1));
                if (std::find(p.succs[b].begin(), p.succs[b].end(), s) == p.succs[b].end()) {
                    p.succs[b].push_back(s);
                }
            }
        }
        for (int b = 0; b < nb; ++b) {
            for (int v = 0; v < nv; ++v) {
                if (rng() % 4 == 0) p.use[b].set(v);
                if (rng() % 4 == 0) p.def[b].set(v);
            }
        }
        const auto res = taskc::solve_liveness(p);
        std::function<bool(int, int)> live = [&](int b, int v) {
            if (p.use[b].test(v)) return true;
            if (p.def[b].test(v)) return false;
            for (int s : p.succs[b]) {
                if (live(s, v)) return true;
            }
            return false;
        };
        bool ok = true;
        for (int b = 0; b < nb && ok; ++b) {
            for (int v = 0; v < nv && ok; ++v) ok = res.live_in[b].test(v) == live(b, v);
        }
        if (!ok) ++wrong;
    }
    if (wrong != 0) o.fail(std::to_string(wrong) + " CFGs disagree with path enumeration");
    if (programs < 200) o.fail("only " + std::to_string(programs) + " programs");
    if (o.pass) {
        o.detail = std::to_string(programs) + " programs match the reference evaluator; " +
                   std::to_string(cfgs) + " CFGs match path enumeration";
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    int violations = 0;
    for (const auto& b : g_bounds) {
        const std::int64_t t1p = (b.work + b.lanes - 1) / b.lanes;
        if (b.makespan < std::max(t1p, b.span)) {
            ++violations;
            o.fail(b.label + ": makespan " + std::to_string(b.makespan) + " below bound");
        }
    }
    std::string d = std::to_string(g_bounds.size()) + " deterministic runs satisfy makespan >= max(T1/P, T_inf)";
    if (violations) d = std::to_string(violations) + " bound violations";

    // Unit-cost fib(3) as a native state machine.
    TaskRegistry reg;
    const FnId id = reg.size();
    reg.add_native("fib", 1, [id](InvocationContext& ctx) {
        if (ctx.state() == 0) {
            const Value n = ctx.arg(0);
            if (n < 2) return TaskAction::finish(n);
            ctx.spawn(id, {n - 1});
            ctx.spawn(id, {n - 2});
            return TaskAction::suspend(1, 0);
        }
        return TaskAction::finish(ctx.load_result(0) + ctx.load_result(1));
    });
    RuntimeConfig c;
    c.grid_size = c.block_size = c.warp_size = 1;
    BufferStore bufs;
    const auto r = run(reg, {id, {3}, 0}, c, bufs);
    d += "; fib(3) unit cost T1=" + std::to_string(r.work_span.total_work) +
         " T_inf=" + std::to_string(r.work_span.critical_path);
    if (r.work_span.total_work != 9) {
        o.fail("fib(3) T1 is " + std::to_string(r.work_span.total_work) +
               ", expected 9 (calls {3,2,1,1,0}, only fib(3) and fib(2) suspend: 7 invocations)");
    }
    if (r.work_span.critical_path != 5) o.fail("fib(3) T_inf != 5");
    if (o.pass) o.detail = d;
    else o.detail += " (" + d + ")";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
    int failed = 0;
    for (const auto& [n, check] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = check();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        if (!o.pass) ++failed;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail
                  << ", " << fmt(seconds_since(t0)) << " s)" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
