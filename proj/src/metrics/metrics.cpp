#include "sfj/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sfj/errors.hpp"

namespace sfj {

void DivergenceStats::add_batch(int size, int distinct) {
    ++batches;
    tasks += static_cast<std::uint64_t>(size);
    distinct_paths += static_cast<std::uint64_t>(distinct);
    ++histogram[distinct];
}

void DivergenceStats::finalize(int warp_size) {
    if (batches == 0) return;
    mean_distinct_paths = double(distinct_paths) / double(batches);
    lane_utilization = double(tasks) / (double(batches) * double(warp_size));
}

int distinct_paths(std::span<const PathSignature> sigs) {
    int n = 0;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i && !seen; ++j) seen = sigs[j].same_path(sigs[i]);
        if (!seen) ++n;
    }
    return n;
}

std::uint64_t batch_cost(std::span<const PathSignature> sigs, std::span<const std::uint64_t> costs) {
    std::uint64_t total = 0;
    std::vector<char> done(sigs.size(), 0);
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        if (done[i]) continue;
        std::uint64_t worst = 0;
        for (std::size_t j = i; j < sigs.size(); ++j) {
            if (!done[j] && sigs[j].same_path(sigs[i])) {
                done[j] = 1;
                worst = std::max(worst, costs[j]);
            }
        }
        total += worst;
    }
    return total;
}

WorkSpan compute_work_span(std::span<const InvocationRecord> log) {
    WorkSpan ws;
    const std::size_t n = log.size();
    // Invocations of each task ordered by state.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < n; ++i) {
        by_task[log[i].task].push_back(i);
        ws.total_work += static_cast<std::int64_t>(log[i].cost);
    }
    for (auto& [task, v] : by_task) {
        std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
            return log[a].state < log[b].state;
        });
        for (std::size_t k = 1; k < v.size(); ++k) {
            if (log[v[k]].state == log[v[k - 1]].state) {
                throw InternalError("invocation log: task state dispatched twice");
            }
        }
    }
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<int> indeg(n, 0);
    auto edge = [&](std::size_t a, std::size_t b) {
        succ[a].push_back(b);
        ++indeg[b];
    };
    for (auto& [task, v] : by_task) {
        for (std::size_t k = 1; k < v.size(); ++k) edge(v[k - 1], v[k]);
        const InvocationRecord& first = log[v.front()];
        if (!first.has_parent) continue;
        auto p = by_task.find(first.parent);
        if (p == by_task.end()) throw InternalError("invocation log: parent missing");
        const auto& pv = p->second;
        std::size_t k = 0;
        while (k < pv.size() && log[pv[k]].state != first.parent_state) ++k;
        if (k == pv.size()) throw InternalError("invocation log: spawning state missing");
        edge(pv[k], v.front());
        if (k + 1 < pv.size()) edge(v.back(), pv[k + 1]);
    }
    // Kahn's algorithm with longest-path relaxation.
    std::vector<std::int64_t> finish(n, 0);
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.push_back(i);
    }
    std::vector<std::int64_t> start(n, 0);
    std::size_t processed = 0;
    while (!ready.empty()) {
        const std::size_t i = ready.back();
        ready.pop_back();
        ++processed;
        finish[i] = start[i] + static_cast<std::int64_t>(log[i].cost);
        ws.critical_path = std::max(ws.critical_path, finish[i]);
        for (std::size_t s : succ[i]) {
            start[s] = std::max(start[s], finish[i]);
            if (--indeg[s] == 0) ready.push_back(s);
        }
    }
    if (processed != n) throw InternalError("invocation log contains a dependency cycle");
    return ws;
}

void TimelineRecorder::task_exec(WorkerId w, std::int64_t t0, std::int64_t t1, int lanes) {
    if (t1 <= t0) return;
    per_worker_[w].push_back({w, t0, t1, TimelineSegment::Kind::task_exec, lanes});
}

void TimelineRecorder::idle(WorkerId w, std::int64_t t0, std::int64_t t1) {
    if (t1 <= t0) return;
    auto& v = per_worker_[w];
    if (!v.empty() && v.back().kind == TimelineSegment::Kind::idle && v.back().t_end == t0) {
        v.back().t_end = t1;
        return;
    }
    v.push_back({w, t0, t1, TimelineSegment::Kind::idle, 0});
}

std::vector<TimelineSegment> TimelineRecorder::finish(std::int64_t makespan,
                                                      std::int64_t origin) const {
    std::vector<TimelineSegment> out;
    for (std::size_t w = 0; w < per_worker_.size(); ++w) {
        std::int64_t t = origin;
        auto emit_idle = [&](std::int64_t until) {
            if (until <= t) return;
            if (!out.empty() && out.back().worker == static_cast<WorkerId>(w) &&
                out.back().kind == TimelineSegment::Kind::idle && out.back().t_end == t) {
                out.back().t_end = until;
            } else {
                out.push_back({static_cast<WorkerId>(w), t, until, TimelineSegment::Kind::idle, 0});
            }
            t = until;
        };
        for (TimelineSegment s : per_worker_[w]) {
            if (s.t_start >= makespan) break;
            s.t_start = std::max(s.t_start, t);
            s.t_end = std::min(s.t_end, makespan);
            if (s.t_end <= s.t_start) continue;
            emit_idle(s.t_start);
            if (s.kind == TimelineSegment::Kind::idle) {
                emit_idle(s.t_end);
            } else {
                out.push_back(s);
                t = s.t_end;
            }
        }
        emit_idle(makespan);
    }
    return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json counters_json(const QueueCounters& c) {
    ordered_json j;
    j["push_ops"] = c.push_ops;
    j["pushed_tasks"] = c.pushed_tasks;
    j["pop_attempts"] = c.pop_attempts;
    j["popped_tasks"] = c.popped_tasks;
    j["steal_attempts"] = c.steal_attempts;
    j["stolen_tasks"] = c.stolen_tasks;
    j["failed_steals"] = c.failed_steals;
    j["claims"] = c.claims;
    j["cas_failures"] = c.cas_failures;
    j["lock_acquisitions"] = c.lock_acquisitions;
    j["lock_failures"] = c.lock_failures;
    return j;
}

ordered_json config_obj(const RuntimeConfig& c) {
    ordered_json j;
    j["grid_size"] = c.grid_size;
    j["block_size"] = c.block_size;
    j["warp_size"] = c.warp_size;
    j["max_tasks_per_warp"] = c.max_tasks_per_warp;
    j["max_tasks_per_block"] = c.max_tasks_per_block;
    j["max_child_tasks"] = c.max_child_tasks;
    j["num_queues"] = c.num_queues;
    j["max_task_data_size"] = c.max_task_data_size;
    j["assume_no_taskwait"] = c.assume_no_taskwait;
    j["granularity"] = std::string(to_string(c.granularity));
    j["scheduler"] = std::string(to_string(c.scheduler));
    j["queue_alg"] = std::string(to_string(c.queue_alg));
    j["engine"] = std::string(to_string(c.engine));
    j["seed"] = c.seed;
    j["epaq_pure_keep"] = c.epaq_pure_keep;
    j["steal_half"] = c.steal_half;
    j["steal_attempts"] = c.steal_attempts;
    j["workers"] = c.num_workers();
    return j;
}

const char* kind_name(TimelineSegment::Kind k) {
    return k == TimelineSegment::Kind::task_exec ? "task_exec" : "idle";
}

}  // namespace

std::string config_json(const RuntimeConfig& c) { return config_obj(c).dump(); }

std::string report_json(const RunReport& r) {
    ordered_json j;
    j["seed"] = r.config.seed;
    j["config"] = config_obj(r.config);
    for (const auto& [k, v] : r.extra) j["spec"][k] = v;
    j["root_result"] = r.root_result;
    j["makespan"] = r.makespan;
    j["tasks_allocated"] = r.tasks_allocated;
    j["invocations"] = r.invocation_count;
    j["outstanding_at_exit"] = r.outstanding_at_exit;
    ordered_json ws;
    ws["total_work"] = r.work_span.total_work;
    ws["critical_path"] = r.work_span.critical_path;
    ws["makespan"] = r.work_span.makespan;
    j["work_span"] = ws;
    ordered_json d;
    d["batches"] = r.divergence.batches;
    d["tasks"] = r.divergence.tasks;
    d["mean_distinct_paths"] = r.divergence.mean_distinct_paths;
    d["lane_utilization"] = r.divergence.lane_utilization;
    ordered_json h = ordered_json::object();
    for (const auto& [k, v] : r.divergence.histogram) h[std::to_string(k)] = v;
    d["histogram"] = h;
    j["divergence"] = d;
    j["queue_counters"] = counters_json(r.queues);
    ordered_json tl = ordered_json::array();
    for (const auto& s : r.timeline) {
        tl.push_back({s.worker, s.t_start, s.t_end, kind_name(s.kind), s.active_lanes});
    }
    j["timeline_columns"] = {"worker", "t_start", "t_end", "kind", "active_lanes"};
    j["timeline"] = tl;
    return j.dump(1) + "\n";
}

std::string report_csv(const RunReport& r) {
    std::ostringstream os;
    os << "worker,t_start,t_end,kind,active_lanes\n";
    for (const auto& s : r.timeline) {
        os << s.worker << ',' << s.t_start << ',' << s.t_end << ',' << kind_name(s.kind) << ','
           << s.active_lanes << '\n';
    }
    // Summary section: key,value rows after a blank line.
    os << "\nkey,value\n";
    auto kv = [&](const std::string& k, const auto& v) { os << k << ',' << v << '\n'; };
    kv("seed", r.config.seed);
    for (const auto& [k, v] : r.extra) kv("spec." + k, v);
    const ordered_json config = config_obj(r.config);
    for (const auto& [k, v] : config.items()) {
        kv("config." + k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    kv("root_result", r.root_result);
    kv("makespan", r.makespan);
    kv("tasks_allocated", r.tasks_allocated);
    kv("invocations", r.invocation_count);
    kv("outstanding_at_exit", r.outstanding_at_exit);
    kv("total_work", r.work_span.total_work);
    kv("critical_path", r.work_span.critical_path);
    kv("batches", r.divergence.batches);
    kv("batched_tasks", r.divergence.tasks);
    kv("mean_distinct_paths", ordered_json(r.divergence.mean_distinct_paths).dump());
    kv("lane_utilization", ordered_json(r.divergence.lane_utilization).dump());
    for (const auto& [k, v] : r.divergence.histogram) kv("distinct_paths_hist." + std::to_string(k), v);
    const ordered_json counters = counters_json(r.queues);
    for (const auto& [k, v] : counters.items()) kv("queue." + k, v.dump());
    return os.str();
}

void export_report(const RunReport& r, const std::string& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << (format == ReportFormat::csv ? report_csv(r) : report_json(r));
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace sfj
