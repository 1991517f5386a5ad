#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "sfj/bench.hpp"
#include "sfj/errors.hpp"

namespace sfj::bench {

const char* const kSweepHeader =
    "bench,point,rep,engine,granularity,sched,queue_alg,workers,num_queues,seed,n,cutoff,"
    "mem_ops,compute_iters,ok,time,makespan,wall_seconds,total_work,critical_path,tasks,"
    "invocations,mean_distinct_paths,lane_utilization,acquired_tasks,sync_ops,claims,"
    "lock_acquisitions,failed_steals,error";
const char* const kMedianHeader = "bench,point,reps,ok_reps,median_time";

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

long long to_int(const std::string& axis, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used, 0);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw UsageError("sweep axis '" + axis + "': '" + v + "' is not an integer");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

}  // namespace

SweepAxis parse_axis(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
        throw UsageError("sweep axis must look like name=v1,v2,... (got '" + std::string(text) + "')");
    }
    SweepAxis a{std::string(text.substr(0, eq)), split(text.substr(eq + 1), ',')};
    for (const auto& v : a.values) {
        if (v.empty()) throw UsageError("sweep axis '" + a.name + "' has an empty value");
    }
    return a;
}

void set_workers(RuntimeConfig& c, int workers) {
    if (workers < 1) throw UsageError("workers must be >= 1");
    c.grid_size = workers;
    if (c.granularity == Granularity::thread_level) c.block_size = c.warp_size;
}

void apply_axis(const std::string& name, const std::string& v, BenchSpec& s, RuntimeConfig& c) {
    if (name == "workers" || name == "P") {
        set_workers(c, static_cast<int>(to_int(name, v)));
    } else if (name == "n" || name == "D") {
        s.n = to_int(name, v);
    } else if (name == "cutoff") {
        s.cutoff = static_cast<int>(to_int(name, v));
    } else if (name == "cutoff_sort") {
        s.cutoff_sort = static_cast<int>(to_int(name, v));
    } else if (name == "cutoff_merge") {
        s.cutoff_merge = static_cast<int>(to_int(name, v));
    } else if (name == "mem_ops") {
        s.mem_ops = static_cast<int>(to_int(name, v));
    } else if (name == "compute_iters") {
        s.compute_iters = static_cast<int>(to_int(name, v));
    } else if (name == "queues") {
        c.num_queues = static_cast<int>(to_int(name, v));
    } else if (name == "sched") {
        c.scheduler = parse_scheduler(v);
    } else if (name == "queue_alg") {
        c.queue_alg = parse_queue_alg(v);
    } else if (name == "engine") {
        c.engine = parse_engine(v);
    } else if (name == "granularity") {
        const int workers = c.num_workers();
        c.granularity = parse_granularity(v);
        set_workers(c, workers);
    } else {
        throw UsageError("unknown sweep axis '" + name + "'");
    }
}

SweepResult sweep(const SweepPlan& plan, const BenchSpec& base, const RuntimeConfig& config) {
    if (plan.repetitions < 1) throw UsageError("repetitions must be >= 1");
    // Validate every value up front so a typo fails before any run.
    for (const auto& a : plan.axes) {
        for (const auto& v : a.values) {
            BenchSpec s = base;
            RuntimeConfig c = config;
            apply_axis(a.name, v, s, c);
        }
    }
    std::ostringstream rows;
    rows << kSweepHeader << "\n";
    std::ostringstream med;
    med << kMedianHeader << "\n";
    SweepResult result;

    std::vector<std::size_t> idx(plan.axes.size(), 0);
    while (true) {
        BenchSpec spec = base;
        RuntimeConfig cfg = config;
        std::string point;
        for (std::size_t i = 0; i < plan.axes.size(); ++i) {
            const auto& a = plan.axes[i];
            apply_axis(a.name, a.values[idx[i]], spec, cfg);
            if (!point.empty()) point += ';';
            point += a.name + "=" + a.values[idx[i]];
        }
        if (point.empty()) point = "base";
        std::vector<double> times;
        for (int rep = 0; rep < plan.repetitions; ++rep) {
            RuntimeConfig rc = cfg;
            rc.seed = config.seed + static_cast<std::uint64_t>(rep);
            std::ostringstream row;
            BenchSpec rs = spec;
            try {
                rs = spec.resolved();
            } catch (const Error&) {
            }
            const RuntimeConfig ec = effective_config(rs, rc);
            row << rs.name << ',' << csv_field(point) << ',' << rep << ','
                << to_string(ec.engine) << ',' << to_string(ec.granularity) << ','
                << to_string(ec.scheduler) << ',' << to_string(ec.queue_alg) << ','
                << ec.num_workers() << ',' << ec.queues_per_worker() << ',' << ec.seed << ','
                << rs.n << ',' << rs.cutoff << ',' << rs.mem_ops << ',' << rs.compute_iters << ',';
            try {
                BenchOutcome o = run_bench(spec, rc);
                const RunReport& r = o.report;
                row << (o.verdict.pass ? 1 : 0) << ',' << r.makespan << ',' << r.makespan << ','
                    << r.wall_seconds << ',' << r.work_span.total_work << ','
                    << r.work_span.critical_path << ',' << r.tasks_allocated << ','
                    << r.invocation_count << ',' << r.divergence.mean_distinct_paths << ','
                    << r.divergence.lane_utilization << ',' << r.queues.acquired_tasks() << ','
                    << r.queues.sync_ops() << ',' << r.queues.claims << ','
                    << r.queues.lock_acquisitions << ',' << r.queues.failed_steals << ','
                    << csv_field(o.verdict.pass ? "" : o.verdict.detail);
                if (o.verdict.pass) {
                    times.push_back(static_cast<double>(r.makespan));
                } else {
                    ++result.failures;
                }
            } catch (const std::exception& e) {
                ++result.failures;
                row << "0,,,,,,,,,,,,,,," << csv_field(e.what());
            }
            rows << row.str() << "\n";
        }
        med << spec.name << ',' << csv_field(point) << ',' << plan.repetitions << ','
            << times.size() << ',' << median(times) << "\n";

        bool done = true;
        for (std::size_t k = plan.axes.size(); k-- > 0;) {
            if (++idx[k] < plan.axes[k].values.size()) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if (done) break;
    }
    result.csv = rows.str();
    result.medians = med.str();
    if (!plan.output_path.empty()) {
        std::ofstream out(plan.output_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + plan.output_path + "' for writing");
        out << result.csv;
        if (!out) throw Error("failed writing '" + plan.output_path + "'");
    }
    return result;
}

}  // namespace sfj::bench
