#include "sfj/taskc/analysis.hpp"

#include <algorithm>

namespace sfj::taskc {

LivenessProblem liveness_problem(const Cfg& cfg) {
    LivenessProblem p;
    p.num_vars = cfg.num_vars();
    p.entry = Cfg::kEntry;
    p.succs = cfg.successor_lists();
    const int n = cfg.num_blocks();
    p.use.assign(n, VarSet(p.num_vars));
    p.def.assign(n, VarSet(p.num_vars));
    std::vector<int> uses;
    for (int b = 0; b < n; ++b) {
        auto note_uses = [&] {
            for (int v : uses) {
                if (!p.def[b][v]) p.use[b].set(v);
            }
            uses.clear();
        };
        for (const Instr& in : cfg.blocks[b].code) {
            instr_uses(in, uses);
            note_uses();
            if (int d = instr_def(in); d >= 0) p.def[b].set(d);
        }
        term_uses(cfg.blocks[b].term, uses);
        note_uses();
    }
    return p;
}

std::vector<int> reverse_postorder(const std::vector<std::vector<int>>& succs, int entry) {
    const int n = static_cast<int>(succs.size());
    std::vector<int> post;
    std::vector<char> seen(n, 0);
    std::vector<std::pair<int, std::size_t>> stack = {{entry, 0}};
    seen[entry] = 1;
    while (!stack.empty()) {
        auto& [b, i] = stack.back();
        if (i < succs[b].size()) {
            const int s = succs[b][i++];
            if (!seen[s]) {
                seen[s] = 1;
                stack.push_back({s, 0});
            }
        } else {
            post.push_back(b);
            stack.pop_back();
        }
    }
    std::reverse(post.begin(), post.end());
    return post;
}

LivenessResult solve_liveness(const LivenessProblem& p) {
    const int n = static_cast<int>(p.succs.size());
    LivenessResult r;
    r.live_in.assign(n, VarSet(p.num_vars));
    r.live_out.assign(n, VarSet(p.num_vars));

    std::vector<int> order = reverse_postorder(p.succs, p.entry);
    std::reverse(order.begin(), order.end());
    std::vector<char> in_order(n, 0);
    for (int b : order) in_order[b] = 1;
    for (int b = 0; b < n; ++b) {
        if (!in_order[b]) order.push_back(b);
    }

    bool changed = true;
    VarSet tmp(p.num_vars);
    while (changed) {
        changed = false;
        ++r.sweeps;
        for (int b : order) {
            tmp.reset();
            for (int s : p.succs[b]) tmp |= r.live_in[s];
            r.live_out[b] = tmp;
            tmp -= p.def[b];
            tmp |= p.use[b];
            if (tmp != r.live_in[b]) {
                r.live_in[b] = tmp;
                changed = true;
            }
        }
    }
    return r;
}

LivenessResult liveness(const Cfg& cfg) { return solve_liveness(liveness_problem(cfg)); }

std::vector<int> immediate_dominators(const std::vector<std::vector<int>>& succs, int entry) {
    // Cooper, Harvey and Kennedy's iterative scheme over reverse postorder.
    const int n = static_cast<int>(succs.size());
    std::vector<int> rpo = reverse_postorder(succs, entry);
    std::vector<int> index(n, -1);
    for (std::size_t i = 0; i < rpo.size(); ++i) index[rpo[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> preds(n);
    for (int b = 0; b < n; ++b) {
        if (index[b] < 0) continue;
        for (int s : succs[b]) preds[s].push_back(b);
    }
    std::vector<int> idom(n, -1);
    idom[entry] = entry;
    auto intersect = [&](int a, int b) {
        while (a != b) {
            while (index[a] > index[b]) a = idom[a];
            while (index[b] > index[a]) b = idom[b];
        }
        return a;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 1; i < rpo.size(); ++i) {
            const int b = rpo[i];
            int nd = -1;
            for (int p : preds[b]) {
                if (idom[p] < 0) continue;
                nd = nd < 0 ? p : intersect(p, nd);
            }
            if (nd != idom[b]) {
                idom[b] = nd;
                changed = true;
            }
        }
    }
    return idom;
}

bool dominates(const std::vector<int>& idom, int a, int b) {
    if (a < 0 || b < 0 || idom[b] < 0 || idom[a] < 0) return false;
    for (;;) {
        if (b == a) return true;
        if (idom[b] == b) return false;
        b = idom[b];
    }
}

std::vector<char> reachable_from(const std::vector<std::vector<int>>& succs, int from) {
    std::vector<char> seen(succs.size(), 0);
    std::vector<int> work = {from};
    while (!work.empty()) {
        const int b = work.back();
        work.pop_back();
        if (seen[b]) continue;
        seen[b] = 1;
        for (int s : succs[b]) work.push_back(s);
    }
    return seen;
}

VarSet spill_set(const Cfg& cfg, const LivenessResult& live) {
    const auto succs = cfg.successor_lists();
    const auto idom = immediate_dominators(succs, Cfg::kEntry);
    const int nv = cfg.num_vars();
    VarSet spill(nv);
    std::vector<int> refs;
    for (int t : cfg.taskwaits) {
        const int cont = cfg.blocks[t].term.target;
        spill |= live.live_in[cont];

        VarSet referenced(nv);
        const auto reach = reachable_from(succs, cont);
        for (int b = 0; b < cfg.num_blocks(); ++b) {
            if (!reach[b]) continue;
            for (const Instr& in : cfg.blocks[b].code) {
                refs.clear();
                instr_uses(in, refs);
                if (int d = instr_def(in); d >= 0) refs.push_back(d);
                if (in.bind_var >= 0) refs.push_back(in.bind_var);
                for (int v : refs) referenced.set(v);
            }
            refs.clear();
            term_uses(cfg.blocks[b].term, refs);
            for (int v : refs) referenced.set(v);
        }
        for (int v = 0; v < nv; ++v) {
            if (referenced[v] && dominates(idom, cfg.decl_block[v], t)) spill.set(v);
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (cfg.vars[v].is_param) spill.reset(v);
    }
    return spill;
}

}  // namespace sfj::taskc
