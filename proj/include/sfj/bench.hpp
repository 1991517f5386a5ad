#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfj/buffers.hpp"
#include "sfj/config.hpp"
#include "sfj/metrics.hpp"
#include "sfj/runtime.hpp"
#include "sfj/taskc/ir.hpp"

namespace sfj::bench {

/// Benchmark instance. Negative or zero fields mean "use the benchmark default".
struct BenchSpec {
    std::string name = "fib";  // fib, nqueens, mergesort, cilksort, ftree, ptree
    std::int64_t n = -1;       // fib n, board size, array length, or tree depth D
    int cutoff = -1;           // fib CUTOFF, nqueens cutoff depth, mergesort CUTOFF
    int cutoff_sort = -1;
    int cutoff_merge = -1;
    int branching = -1;        // tree B
    int mem_ops = 0;
    int compute_iters = 0;
    std::int64_t table_size = 1 << 16;
    std::uint64_t prune_seed = 1;  // ptree shape
    std::uint64_t input_seed = 1;  // arrays and the load table

    /// Fills every defaulted field; throws UsageError for unknown names or
    /// out-of-range parameters.
    BenchSpec resolved() const;
};

std::vector<std::string> bench_names();
/// DSL source shipped for a benchmark.
std::string_view source(std::string_view name);

struct Verdict {
    bool pass = false;
    std::string detail;
};

/// Compiled program plus everything a run needs.
struct Prepared {
    BenchSpec spec;
    RuntimeConfig config;
    std::shared_ptr<taskc::IrProgram> program;
    TaskRegistry registry;
    BufferStore buffers;
    SpawnRequest root;
    std::vector<Value> input;  // sort benchmarks: the unsorted input
};

/// The runtime config a benchmark actually runs with (nqueens forces
/// assume_no_taskwait; block-level forces one queue).
RuntimeConfig effective_config(const BenchSpec& spec, const RuntimeConfig& config);
std::unique_ptr<Prepared> prepare(const BenchSpec& spec, const RuntimeConfig& config);

struct BenchOutcome {
    RunReport report;
    Verdict verdict;
};

/// Runs the benchmark and checks it against its native oracle.
BenchOutcome run_bench(const BenchSpec& spec, const RuntimeConfig& config);

/// Compares a finished run with the native oracle.
Verdict oracle_check(const Prepared& p, const RunReport& report);

// Native sequential oracles.
Value fib_oracle(int n);
Value nqueens_oracle(int n);
/// Node count of the tree the DSL builds for (D, B, seed); full tree when !pruned.
std::uint64_t tree_oracle(int depth, int branching, std::uint64_t seed, bool pruned);
/// Deterministic random input for the sort benchmarks.
std::vector<Value> sort_input(std::int64_t n, std::uint64_t seed);

/// One swept parameter. Axes: workers, n, D, cutoff, mem_ops, compute_iters,
/// queues, sched, queue_alg, engine, granularity.
struct SweepAxis {
    std::string name;
    std::vector<std::string> values;
};

struct SweepPlan {
    std::vector<SweepAxis> axes;  // crossed, first axis outermost
    int repetitions = 1;
    std::string output_path;      // empty: no file
};

/// Parses "axis=v1,v2,...".
SweepAxis parse_axis(std::string_view text);

/// Applies `value` of axis `name` to the BenchSpec or RuntimeConfig.
void apply_axis(const std::string& name, const std::string& value, BenchSpec& spec,
                RuntimeConfig& config);

/// Sets the topology so the run has `workers` workers (one warp per block).
void set_workers(RuntimeConfig& config, int workers);

struct SweepResult {
    std::string csv;      // one row per (point, repetition)
    std::string medians;  // one row per point: median time over repetitions
    int failures = 0;
};

/// Failures are recorded in their row and the sweep continues. Writes
/// `plan.output_path` when set.
SweepResult sweep(const SweepPlan& plan, const BenchSpec& base, const RuntimeConfig& config);

extern const char* const kSweepHeader;
extern const char* const kMedianHeader;

}  // namespace sfj::bench
