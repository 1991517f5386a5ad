#include "sfj/taskc/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sfj/errors.hpp"
#include "sfj/taskc/parser.hpp"

namespace sfj::taskc {
namespace {

using Diags = std::vector<Diagnostic>;

void error(Diags& d, Loc loc, std::string msg) {
    d.push_back(Diagnostic{loc.line, loc.column, std::move(msg)});
}

// Children spawned since the start of the current epoch, and result bindings that
// are waiting for the next taskwait.
struct EpochState {
    bool reached = false;
    int count = 0;  // -1: not statically known
    std::set<std::pair<int, int>> must;  // (var, ordinal)
    std::set<std::pair<int, int>> may;

    bool pending(int var) const {
        for (const auto& [v, o] : may) {
            if (v == var) return true;
        }
        return false;
    }
    bool operator==(const EpochState&) const = default;
};

EpochState join(const EpochState& a, const EpochState& b) {
    if (!a.reached) return b;
    if (!b.reached) return a;
    EpochState r;
    r.reached = true;
    r.count = a.count == b.count ? a.count : -1;
    std::set_intersection(a.must.begin(), a.must.end(), b.must.begin(), b.must.end(),
                          std::inserter(r.must, r.must.end()));
    r.may = a.may;
    r.may.insert(b.may.begin(), b.may.end());
    return r;
}

class BindingAnalysis {
public:
    BindingAnalysis(const Program& prog, const Function& fn, Cfg& cfg, Diags& diags)
        : prog_(prog), fn_(fn), cfg_(cfg), diags_(diags) {}

    void run() {
        const int n = cfg_.num_blocks();
        in_.assign(n, EpochState{});
        in_[Cfg::kEntry].reached = true;
        for (int t : cfg_.taskwaits) fresh(cfg_.blocks[t].term.target);
        bool changed = true;
        int rounds = 0;
        while (changed && ++rounds < 1000) {
            changed = false;
            for (int b = 0; b < n; ++b) {
                if (!in_[b].reached) continue;
                EpochState out = transfer(b, false);
                const Terminator& term = cfg_.blocks[b].term;
                if (term.kind == Terminator::Kind::taskwait) continue;
                for (int s : cfg_.successors(b)) {
                    if (is_continuation(s)) continue;
                    EpochState j = join(in_[s], out);
                    if (!(j == in_[s])) {
                        in_[s] = std::move(j);
                        changed = true;
                    }
                }
            }
        }
        for (int b = 0; b < n; ++b) {
            if (in_[b].reached) transfer(b, true);
        }
        // Continuations start by reading the joined results into their variables.
        for (int t : cfg_.taskwaits) {
            const EpochState at = in_[t];
            std::vector<Instr> loads;
            for (const auto& [var, ordinal] : at.must) {
                Instr in;
                in.op = Opcode::load_result;
                in.dst = Operand::var(var);
                in.ordinal = ordinal;
                in.loc = cfg_.blocks[t].term.loc;
                loads.push_back(in);
            }
            std::sort(loads.begin(), loads.end(),
                      [](const Instr& a, const Instr& b) { return a.ordinal < b.ordinal; });
            auto& code = cfg_.blocks[cfg_.blocks[t].term.target].code;
            code.insert(code.begin(), loads.begin(), loads.end());
        }
    }

private:
    void fresh(int b) {
        in_[b] = EpochState{};
        in_[b].reached = true;
        continuations_.insert(b);
    }
    bool is_continuation(int b) const { return continuations_.count(b) > 0; }

    const std::string& name(int v) const { return cfg_.vars[v].name; }

    void check_access(const EpochState& s, int var, Loc loc, bool report, bool write) {
        if (!report || var < 0 || !s.pending(var)) return;
        error(diags_, loc,
              std::string(write ? "write to '" : "read of '") + name(var) +
                  "' before the taskwait that joins the spawn bound to it");
    }

    EpochState transfer(int b, bool report) {
        EpochState s = in_[b];
        std::vector<int> uses;
        for (Instr& in : cfg_.blocks[b].code) {
            uses.clear();
            instr_uses(in, uses);
            for (int v : uses) check_access(s, v, in.loc, report, false);
            check_access(s, instr_def(in), in.loc, report, true);
            if (in.op != Opcode::spawn) continue;
            in.ordinal = -1;
            if (in.bind_var >= 0) {
                const Function& callee = prog_.functions[in.callee];
                if (report && !callee.returns_value) {
                    error(diags_, in.loc, "task '" + callee.name + "' returns no value to bind");
                }
                if (s.count < 0) {
                    if (report) {
                        error(diags_, in.loc,
                              "spawn binding '" + name(in.bind_var) +
                                  "' has no statically known child ordinal "
                                  "(spawn count differs between paths since the last taskwait)");
                    }
                } else {
                    if (report && s.pending(in.bind_var)) {
                        error(diags_, in.loc,
                              "'" + name(in.bind_var) + "' is bound twice before one taskwait");
                    }
                    in.ordinal = s.count;
                    s.must.insert({in.bind_var, s.count});
                    s.may.insert({in.bind_var, s.count});
                }
            } else if (s.count >= 0) {
                in.ordinal = s.count;
            }
            if (s.count >= 0) ++s.count;
        }
        const Terminator& t = cfg_.blocks[b].term;
        uses.clear();
        term_uses(t, uses);
        for (int v : uses) check_access(s, v, t.loc, report, false);
        if (report && t.kind == Terminator::Kind::taskwait && s.may != s.must) {
            for (const auto& p : s.may) {
                if (!s.must.count(p)) {
                    error(diags_, t.loc,
                          "spawn result '" + name(p.first) +
                              "' is bound on some but not all paths reaching this taskwait");
                    break;
                }
            }
        }
        if (report && t.kind == Terminator::Kind::ret && !s.may.empty()) {
            error(diags_, t.loc,
                  "result of a spawn bound to '" + name(s.may.begin()->first) +
                      "' is never joined before return");
        }
        return s;
    }

    const Program& prog_;
    const Function& fn_;
    Cfg& cfg_;
    Diags& diags_;
    std::vector<EpochState> in_;
    std::set<int> continuations_;
};

void structural_checks(const Function& fn, const Cfg& cfg, Diags& diags) {
    const auto succs = cfg.successor_lists();
    const auto from_entry = reachable_from(succs, Cfg::kEntry);
    if (fn.returns_value && cfg.fall_off_block >= 0 && from_entry[cfg.fall_off_block]) {
        error(diags, fn.loc, "function '" + fn.name + "' can reach its end without returning a value");
    }
    for (int t : cfg.taskwaits) {
        const auto reach = reachable_from(succs, cfg.blocks[t].term.target);
        if (reach[t]) {
            error(diags, cfg.blocks[t].term.loc,
                  "taskwait inside a loop is not supported (its continuation can reach it "
                  "again); split the loop into recursive tasks");
        }
    }
}

IrFunction finalize(const Function& fn, const Cfg& cfg, const VarSet& spill) {
    IrFunction out;
    out.name = fn.name;
    out.is_task = fn.is_task;
    out.arity = fn.arity();
    out.returns_value = fn.returns_value;

    const int nv = cfg.num_vars();
    std::vector<Operand> map(nv);
    if (fn.is_task) {
        auto add_field = [&](int v, LayoutField::Kind k) {
            LayoutField f;
            f.name = v >= 0 ? cfg.vars[v].name : "result";
            f.kind = k;
            f.var = v;
            f.offset = out.layout.words();
            if (v >= 0) map[v] = Operand::field(f.offset);
            out.layout.fields.push_back(f);
        };
        for (int p : fn.params) add_field(p, LayoutField::Kind::arg);
        for (int v = 0; v < nv; ++v) {
            if (spill[v]) add_field(v, LayoutField::Kind::spill);
        }
        if (fn.returns_value) {
            out.layout.result_offset = out.layout.words();
            add_field(-1, LayoutField::Kind::result);
        }
    } else {
        for (int p : fn.params) {
            map[p] = Operand::reg(out.num_regs++);
            out.reg_names.push_back(cfg.vars[p].name);
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (map[v].is_none()) {
            map[v] = Operand::reg(out.num_regs++);
            out.reg_names.push_back(cfg.vars[v].name);
        }
    }
    auto fix = [&](Operand& o) {
        if (o.is_var()) o = map[o.v];
    };
    out.blocks = cfg.blocks;
    for (Block& b : out.blocks) {
        for (Instr& in : b.code) {
            fix(in.dst);
            for (Operand& o : in.src) fix(o);
            fix(in.queue);
        }
        fix(b.term.value);
        if (b.term.kind == Terminator::Kind::ret && b.term.value.is_none()) {
            b.term.value = Operand::imm(0);
        }
    }
    out.state_entry.push_back(Cfg::kEntry);
    for (int t : cfg.taskwaits) out.state_entry.push_back(cfg.blocks[t].term.target);
    return out;
}

}  // namespace

int IrProgram::find_function(const std::string& name) const {
    for (std::size_t i = 0; i < functions.size(); ++i) {
        if (functions[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int IrProgram::find_buffer(const std::string& name) const {
    for (std::size_t i = 0; i < buffers.size(); ++i) {
        if (buffers[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CompileResult compile(std::string_view source, const CompileOptions& options) {
    CompileResult r;
    r.ast = parse(source);
    Diags diags = analyze(r.ast, options);
    if (!diags.empty()) throw CompileError(std::move(diags));

    r.ir.assume_no_taskwait = options.assume_no_taskwait;
    r.ir.block_level = options.block_level;
    for (const auto& b : r.ast.buffers) r.ir.buffers.push_back(b.name);
    for (const Function& fn : r.ast.functions) {
        Cfg cfg = lower_to_cfg(r.ast, fn);
        structural_checks(fn, cfg, diags);
        BindingAnalysis(r.ast, fn, cfg, diags).run();
        LivenessResult live = liveness(cfg);
        VarSet spill = spill_set(cfg, live);
        IrFunction ir = finalize(fn, cfg, spill);
        if (fn.is_task && ir.layout.size_bytes() > options.max_task_data_size) {
            error(diags, fn.loc,
                  "task data for '" + fn.name + "' needs " + std::to_string(ir.layout.size_bytes()) +
                      " bytes, exceeding max_task_data_size " +
                      std::to_string(options.max_task_data_size));
        }
        r.cfgs.push_back(std::move(cfg));
        r.live.push_back(std::move(live));
        r.spills.push_back(std::move(spill));
        r.ir.functions.push_back(std::move(ir));
    }
    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return a.line != b.line ? a.line < b.line : a.column < b.column;
        });
        throw CompileError(std::move(diags));
    }
    return r;
}

IrProgram compile_program(std::string_view source, const CompileOptions& options) {
    return compile(source, options).ir;
}

}  // namespace sfj::taskc
