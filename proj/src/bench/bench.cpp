#include "sfj/bench.hpp"

#include <algorithm>
#include <utility>

#include "sfj/errors.hpp"
#include "sfj/rng.hpp"
#include "sfj/taskc/compiler.hpp"
#include "sfj/taskc/ops.hpp"

namespace sfj::bench {

namespace embedded {
extern const std::pair<std::string_view, std::string_view> kSources[];
extern const int kSourceCount;
}  // namespace embedded

namespace {

const std::vector<std::string> kNames = {"fib",      "nqueens", "mergesort",
                                         "cilksort", "ftree",   "ptree"};

bool is_tree(const std::string& n) { return n == "ftree" || n == "ptree"; }
bool is_sort(const std::string& n) { return n == "mergesort" || n == "cilksort"; }

void require(bool ok, const std::string& what) {
    if (!ok) throw UsageError("benchmark parameter: " + what);
}

}  // namespace

std::vector<std::string> bench_names() { return kNames; }

std::string_view source(std::string_view name) {
    for (int i = 0; i < embedded::kSourceCount; ++i) {
        if (embedded::kSources[i].first == name) return embedded::kSources[i].second;
    }
    throw UsageError("no source for benchmark '" + std::string(name) + "'");
}

BenchSpec BenchSpec::resolved() const {
    BenchSpec s = *this;
    if (std::find(kNames.begin(), kNames.end(), s.name) == kNames.end()) {
        throw UsageError("unknown benchmark '" + s.name + "'");
    }
    if (s.name == "fib") {
        if (s.n < 0) s.n = 25;
        if (s.cutoff < 0) s.cutoff = 0;
        require(s.n <= 92, "fib n must be in [0, 92]");
    } else if (s.name == "nqueens") {
        if (s.n < 0) s.n = 8;
        if (s.cutoff < 0) s.cutoff = 7;
        require(s.n >= 1 && s.n <= 20, "nqueens n must be in [1, 20]");
    } else if (is_sort(s.name)) {
        if (s.n < 0) s.n = 100000;
        if (s.cutoff < 0) s.cutoff = 128;
        if (s.cutoff_sort < 0) s.cutoff_sort = 64;
        if (s.cutoff_merge < 0) s.cutoff_merge = 256;
        require(s.n <= 100000000, "array length must be in [0, 1e8]");
        require(s.cutoff >= 1 && s.cutoff_sort >= 4 && s.cutoff_merge >= 1, "sort cutoffs too small");
    } else {
        if (s.n < 0) s.n = s.name == "ftree" ? 10 : 8;
        if (s.branching < 0) s.branching = s.name == "ftree" ? 2 : 3;
        require(s.n <= 40, "tree depth must be in [0, 40]");
        require(s.branching >= 1 && s.branching <= 64, "tree branching must be in [1, 64]");
        require(s.table_size >= 1, "table_size must be >= 1");
    }
    require(s.mem_ops >= 0 && s.compute_iters >= 0, "mem_ops and compute_iters must be >= 0");
    return s;
}

Value fib_oracle(int n) {
    Value a = 0, b = 1;
    for (int i = 0; i < n; ++i) {
        const Value t = a + b;
        a = b;
        b = t;
    }
    return a;
}

namespace {
Value queens(int n, std::uint64_t cols, std::uint64_t d1, std::uint64_t d2) {
    const std::uint64_t full = (1ULL << n) - 1;
    if (cols == full) return 1;
    Value total = 0;
    std::uint64_t avail = ~(cols | d1 | d2) & full;
    while (avail) {
        const std::uint64_t bit = avail & (~avail + 1);
        avail ^= bit;
        total += queens(n, cols | bit, ((d1 | bit) << 1) & full, (d2 | bit) >> 1);
    }
    return total;
}

bool keep_child(int D, int depth, std::uint64_t child, std::uint64_t seed) {
    std::uint64_t h = child * 0x9e3779b97f4a7c15ULL + seed;
    for (int i = 0; i < 3; ++i) h = static_cast<std::uint64_t>(taskc::lcg_next(static_cast<Value>(h)));
    return ((h >> 33) & 0x7fffffffULL) * static_cast<std::uint64_t>(D) <
           static_cast<std::uint64_t>(D - depth) * 0x80000000ULL;
}

std::uint64_t count_tree(int D, int B, std::uint64_t seed, bool pruned, int depth,
                         std::uint64_t id) {
    std::uint64_t n = 1;
    if (depth >= D) return n;
    for (int c = 0; c < B; ++c) {
        const std::uint64_t child = id * static_cast<std::uint64_t>(B) + c + 1;
        if (!pruned || keep_child(D, depth, child, seed)) {
            n += count_tree(D, B, seed, pruned, depth + 1, child);
        }
    }
    return n;
}
}  // namespace

Value nqueens_oracle(int n) { return queens(n, 0, 0, 0); }

std::uint64_t tree_oracle(int depth, int branching, std::uint64_t seed, bool pruned) {
    if (!pruned) {
        std::uint64_t total = 0, level = 1;
        for (int d = 0; d <= depth; ++d) {
            total += level;
            level *= static_cast<std::uint64_t>(branching);
        }
        return total;
    }
    return count_tree(depth, branching, seed, true, 0, 0);
}

std::vector<Value> sort_input(std::int64_t n, std::uint64_t seed) {
    Rng rng(seed, 0x50);
    std::vector<Value> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = static_cast<Value>(rng.next());
    return v;
}

RuntimeConfig effective_config(const BenchSpec& spec, const RuntimeConfig& config) {
    RuntimeConfig c = config;
    if (spec.name == "nqueens") c.assume_no_taskwait = true;
    if (c.granularity == Granularity::block_level) c.num_queues = 1;
    return c;
}

std::unique_ptr<Prepared> prepare(const BenchSpec& spec_in, const RuntimeConfig& config_in) {
    auto p = std::make_unique<Prepared>();
    p->spec = spec_in.resolved();
    p->config = effective_config(p->spec, config_in);
    p->config.validate();
    const BenchSpec& s = p->spec;

    taskc::CompileOptions opts;
    opts.assume_no_taskwait = p->config.assume_no_taskwait;
    // Benchmark sources carry EPAQ queue clauses. With one queue they all evaluate
    // to 0, and the runtime rejects any other index, so the compile-time ban on
    // queue clauses for block-level code is not applied here.
    opts.block_level = false;
    opts.max_task_data_size = p->config.max_task_data_size;
    const Value nq = p->config.queues_per_worker();
    if (s.name == "fib") {
        opts.consts = {{"CUTOFF", s.cutoff}, {"NUM_QUEUES", nq}};
    } else if (s.name == "nqueens") {
        opts.consts = {{"CUTOFF", s.cutoff}, {"NUM_QUEUES", nq}};
    } else if (s.name == "mergesort") {
        opts.consts = {{"CUTOFF", s.cutoff}};
    } else if (s.name == "cilksort") {
        opts.consts = {{"CUTOFF_SORT", s.cutoff_sort},
                       {"CUTOFF_MERGE", s.cutoff_merge},
                       {"NUM_QUEUES", nq}};
    } else {
        opts.consts = {{"D", s.n},
                       {"B", s.branching},
                       {"MEM_OPS", s.mem_ops},
                       {"COMPUTE_ITERS", s.compute_iters}};
        if (s.name == "ptree") opts.consts["SEED"] = static_cast<Value>(s.prune_seed);
    }
    p->program = std::make_shared<taskc::IrProgram>(taskc::compile_program(source(s.name), opts));
    p->registry = TaskRegistry(p->program);
    p->root.fn = p->registry.id(s.name);

    if (s.name == "fib") {
        p->root.args = {s.n};
    } else if (s.name == "nqueens") {
        p->buffers.add("count", {0});
        p->root.args = {s.n, 0, 0, 0, 0};
    } else if (s.name == "mergesort") {
        p->input = sort_input(s.n, s.input_seed);
        p->buffers.add("data", p->input);
        p->buffers.add("tmp", std::vector<Value>(p->input.size(), 0));
        p->root.args = {0, s.n};
    } else if (s.name == "cilksort") {
        p->input = sort_input(s.n, s.input_seed);
        std::vector<Value> mem = p->input;
        mem.resize(2 * p->input.size(), 0);
        p->buffers.add("mem", std::move(mem));
        p->root.args = {0, s.n, s.n};
    } else {
        Rng rng(s.input_seed, 0x7a);
        std::vector<Value> table(static_cast<std::size_t>(s.table_size));
        for (auto& x : table) x = static_cast<Value>(rng.next() >> 40);
        p->buffers.add("table", std::move(table));
        p->buffers.add("count", {0});
        p->buffers.add("sink", {0});
        p->root.args = {0, 0};
    }
    return p;
}

Verdict oracle_check(const Prepared& p, const RunReport& report) {
    const BenchSpec& s = p.spec;
    auto fail = [](std::string d) { return Verdict{false, std::move(d)}; };
    if (!report.root_finished) return fail("root task did not finish");
    if (report.outstanding_at_exit != 0) {
        return fail("outstanding counter is " + std::to_string(report.outstanding_at_exit));
    }
    auto compare = [&](const char* what, std::uint64_t expected, std::uint64_t actual) {
        if (expected == actual) return Verdict{true, std::string(what) + " = " + std::to_string(actual)};
        return fail(std::string(what) + ": expected " + std::to_string(expected) + ", got " +
                    std::to_string(actual));
    };
    if (s.name == "fib") {
        const Value e = fib_oracle(static_cast<int>(s.n));
        if (e == report.root_result) return {true, "fib = " + std::to_string(e)};
        return fail("fib: expected " + std::to_string(e) + ", got " +
                    std::to_string(report.root_result));
    }
    if (s.name == "nqueens") {
        const Value got = p.buffers.data("count")[0];
        return compare("solutions", static_cast<std::uint64_t>(nqueens_oracle(static_cast<int>(s.n))),
                       static_cast<std::uint64_t>(got));
    }
    if (is_sort(s.name)) {
        const auto n = static_cast<std::size_t>(s.n);
        const std::vector<Value> out(
            (s.name == "mergesort" ? p.buffers.data("data") : p.buffers.data("mem")).begin(),
            (s.name == "mergesort" ? p.buffers.data("data") : p.buffers.data("mem")).begin() +
                static_cast<std::ptrdiff_t>(n));
        for (std::size_t i = 1; i < n; ++i) {
            if (out[i - 1] > out[i]) {
                return fail("output unsorted at index " + std::to_string(i) + ": " +
                            std::to_string(out[i - 1]) + " > " + std::to_string(out[i]));
            }
        }
        std::vector<Value> expected = p.input;
        std::sort(expected.begin(), expected.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (expected[i] != out[i]) {
                return fail("output is not a permutation of the input (first difference at index " +
                            std::to_string(i) + ")");
            }
        }
        return {true, "sorted permutation of " + std::to_string(n) + " values"};
    }
    const std::uint64_t e =
        tree_oracle(static_cast<int>(s.n), s.branching, s.prune_seed, s.name == "ptree");
    Verdict v = compare("node count", e, static_cast<std::uint64_t>(p.buffers.data("count")[0]));
    if (!v.pass) return v;
    return compare("task count", e, report.tasks_allocated);
}

BenchOutcome run_bench(const BenchSpec& spec, const RuntimeConfig& config) {
    auto p = prepare(spec, config);
    BenchOutcome out;
    out.report = run(p->registry, p->root, p->config, p->buffers);
    const BenchSpec& s = p->spec;
    out.report.extra = {{"bench", s.name}, {"n", std::to_string(s.n)}};
    if (s.name == "fib" || s.name == "nqueens" || s.name == "mergesort") {
        out.report.extra.push_back({"cutoff", std::to_string(s.cutoff)});
    }
    if (s.name == "cilksort") {
        out.report.extra.push_back({"cutoff_sort", std::to_string(s.cutoff_sort)});
        out.report.extra.push_back({"cutoff_merge", std::to_string(s.cutoff_merge)});
    }
    if (is_tree(s.name)) {
        out.report.extra.push_back({"branching", std::to_string(s.branching)});
        out.report.extra.push_back({"mem_ops", std::to_string(s.mem_ops)});
        out.report.extra.push_back({"compute_iters", std::to_string(s.compute_iters)});
        if (s.name == "ptree") out.report.extra.push_back({"prune_seed", std::to_string(s.prune_seed)});
    }
    out.report.extra.push_back({"input_seed", std::to_string(s.input_seed)});
    out.verdict = oracle_check(*p, out.report);
    out.report.extra.push_back({"verdict", out.verdict.pass ? "pass" : "fail"});
    return out;
}

}  // namespace sfj::bench
