#pragma once

#include <boost/dynamic_bitset.hpp>
#include <vector>

#include "sfj/taskc/cfg.hpp"

namespace sfj::taskc {

using VarSet = boost::dynamic_bitset<>;

/// Generic backward liveness instance: per-block use (upward-exposed reads) and def.
struct LivenessProblem {
    int num_vars = 0;
    int entry = 0;
    std::vector<std::vector<int>> succs;
    std::vector<VarSet> use;
    std::vector<VarSet> def;
};

struct LivenessResult {
    std::vector<VarSet> live_in;
    std::vector<VarSet> live_out;
    int sweeps = 0;
};

LivenessProblem liveness_problem(const Cfg& cfg);
/// Iterates live_out(B) = U live_in(S), live_in(B) = use(B) | (live_out(B) - def(B)) to
/// a fixpoint, visiting blocks in postorder of a DFS from the entry (unreachable
/// blocks last, by index) so the result and sweep count are reproducible.
LivenessResult solve_liveness(const LivenessProblem& p);
LivenessResult liveness(const Cfg& cfg);

/// Reverse postorder from `entry`; unreachable blocks are omitted.
std::vector<int> reverse_postorder(const std::vector<std::vector<int>>& succs, int entry);

/// Immediate dominators (entry's idom is itself, unreachable blocks get -1).
std::vector<int> immediate_dominators(const std::vector<std::vector<int>>& succs, int entry);
bool dominates(const std::vector<int>& idom, int a, int b);

/// Blocks reachable from `from` (inclusive).
std::vector<char> reachable_from(const std::vector<std::vector<int>>& succs, int from);

/// Variables stored in the task record across taskwaits (parameters excluded; they
/// always have a field). For each taskwait t with continuation c: live_in(c), plus
/// every variable whose declaration block dominates t and which is referenced in
/// some block reachable from c.
VarSet spill_set(const Cfg& cfg, const LivenessResult& live);

}  // namespace sfj::taskc
