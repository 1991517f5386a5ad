// simt-forkjoin: run the benchmark corpus on the simulated runtime.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "sfj/bench.hpp"
#include "sfj/errors.hpp"

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simt-forkjoin: fork-join task runtime simulator"};
    app.require_subcommand(1);
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark, optionally sweeping parameters");

    sfj::bench::BenchSpec spec;
    sfj::RuntimeConfig cfg;
    int workers = 16;
    std::string sched = "ws", alg = "batched", engine = "det", granularity = "thread";
    std::optional<std::uint64_t> seed;
    int reps = 1;
    std::string out;
    std::vector<std::string> sweeps;
    int max_tasks = 0;

    bench->add_option("--bench", spec.name, "fib, nqueens, mergesort, cilksort, ftree, ptree")
        ->check(CLI::IsMember(sfj::bench::bench_names()));
    bench->add_option("--n,--D", spec.n, "problem size (n, board size, array length or depth)");
    bench->add_option("--workers", workers, "number of workers (warps or blocks)");
    bench->add_option("--warp-size", cfg.warp_size);
    bench->add_option("--block-size", cfg.block_size, "lanes per block-level worker");
    bench->add_option("--granularity", granularity)->check(CLI::IsMember({"thread", "block"}));
    bench->add_option("--queues", cfg.num_queues, "EPAQ queues per worker");
    bench->add_option("--cutoff", spec.cutoff);
    bench->add_option("--cutoff-sort", spec.cutoff_sort);
    bench->add_option("--cutoff-merge", spec.cutoff_merge);
    bench->add_option("--branching", spec.branching, "tree fan-out B");
    bench->add_option("--mem-ops", spec.mem_ops);
    bench->add_option("--compute-iters", spec.compute_iters);
    bench->add_option("--prune-seed", spec.prune_seed);
    bench->add_option("--input-seed", spec.input_seed);
    bench->add_option("--max-tasks-per-worker", max_tasks, "pending-task capacity per worker");
    bench->add_option("--max-child-tasks", cfg.max_child_tasks);
    bench->add_option("--sched", sched)->check(CLI::IsMember({"ws", "gq"}));
    bench->add_option("--queue-alg", alg)->check(CLI::IsMember({"batched", "seq-cl"}));
    bench->add_option("--engine", engine)->check(CLI::IsMember({"concurrent", "det"}));
    bench->add_option("--threads", cfg.max_threads, "concurrent engine thread cap");
    bench->add_option("--seed", seed, "scheduler seed (default: $SIMT_FJ_SEED, else 1)");
    bench->add_option("--reps", reps, "repetitions per point")->check(CLI::PositiveNumber);
    bench->add_option("--out", out, "report path (.json for a JSON run report)");
    bench->add_option("--sweep", sweeps, "axis=v1,v2,... (repeatable; axes are crossed)");
    bench->add_flag("--assume-no-taskwait", cfg.assume_no_taskwait);
    bench->add_flag("--epaq-pure-keep", cfg.epaq_pure_keep);
    bench->add_flag("--steal-half", cfg.steal_half);

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed) {
            cfg.seed = *seed;
        } else if (const char* env = std::getenv("SIMT_FJ_SEED")) {
            cfg.seed = std::stoull(env, nullptr, 0);
        }
        cfg.scheduler = sfj::parse_scheduler(sched);
        cfg.queue_alg = sfj::parse_queue_alg(alg);
        cfg.engine = sfj::parse_engine(engine);
        cfg.granularity = sfj::parse_granularity(granularity);
        sfj::bench::set_workers(cfg, workers);
        if (max_tasks > 0) cfg.max_tasks_per_warp = cfg.max_tasks_per_block = max_tasks;

        if (sweeps.empty() && reps == 1) {
            auto o = sfj::bench::run_bench(spec, cfg);
            const auto& r = o.report;
            std::cout << "bench " << spec.name << ": " << (o.verdict.pass ? "PASS" : "FAIL") << " ("
                      << o.verdict.detail << ")\n"
                      << "root_result " << r.root_result << "\nmakespan " << r.makespan
                      << "\ntotal_work " << r.work_span.total_work << "\ncritical_path "
                      << r.work_span.critical_path << "\ntasks " << r.tasks_allocated
                      << "\nmean_distinct_paths " << r.divergence.mean_distinct_paths
                      << "\nlane_utilization " << r.divergence.lane_utilization
                      << "\nsync_ops_per_acquired_task "
                      << (r.queues.acquired_tasks()
                              ? double(r.queues.sync_ops()) / double(r.queues.acquired_tasks())
                              : 0.0)
                      << "\nwall_seconds " << r.wall_seconds << "\n";
            if (!out.empty()) {
                sfj::export_report(r, out,
                                   ends_with(out, ".json") ? sfj::ReportFormat::json
                                                           : sfj::ReportFormat::csv);
            }
            return o.verdict.pass ? 0 : 1;
        }
        sfj::bench::SweepPlan plan;
        for (const auto& s : sweeps) plan.axes.push_back(sfj::bench::parse_axis(s));
        plan.repetitions = reps;
        plan.output_path = out;
        auto res = sfj::bench::sweep(plan, spec, cfg);
        std::cout << res.medians;
        if (res.failures) std::cerr << res.failures << " failed run(s); see the error column\n";
        return res.failures ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "simt-forkjoin: " << e.what() << "\n";
        return 2;
    }
}
