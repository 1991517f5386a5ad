#include "sfj/taskc/interp.hpp"

#include <string>

#include "sfj/errors.hpp"
#include "sfj/rng.hpp"
#include "sfj/taskc/ops.hpp"

namespace sfj::taskc {

IrInterpreter::IrInterpreter(const IrProgram& program, BufferStore& buffers)
    : prog_(program), buffers_(buffers) {
    for (const std::string& name : program.buffers) {
        const int b = buffers.find(name);
        if (b < 0) throw UsageError("program buffer '" + name + "' was not provided");
        buffer_map_.push_back(b);
    }
}

ExecResult IrInterpreter::run(FnId fn, int state, ExecEnv& env) {
    const IrFunction& f = prog_.functions.at(fn);
    if (state < 0 || state >= f.num_states()) {
        throw InternalError("task '" + f.name + "' has no state " + std::to_string(state));
    }
    cost_ = 0;
    regs_.assign(f.num_regs, 0);
    defined_.assign(f.num_regs, 0);  // registers do not survive a state boundary
    std::vector<std::uint64_t> visited((f.blocks.size() + 63) / 64, 0);
    ExecResult r;
    exec(f, f.state_entry[state], 0, &env, &r.action, 0, &visited);
    r.cost = cost_;
    std::uint64_t h = mix64(static_cast<std::uint64_t>(visited.size()));
    for (std::uint64_t w : visited) h = mix64(h ^ w);
    r.path_tag = h;
    return r;
}

Value IrInterpreter::exec(const IrFunction& f, int block, std::size_t base, ExecEnv* env,
                          TaskAction* action, int depth, std::vector<std::uint64_t>* visited) {
    Value* data = env ? env->task_data().data() : nullptr;
    auto read = [&](const Operand& o) -> Value {
        switch (o.kind) {
            case Operand::Kind::imm: return o.v;
            case Operand::Kind::reg: {
                const std::size_t i = base + static_cast<std::size_t>(o.v);
                if (!defined_[i]) {
                    throw InternalError("'" + f.name + "' read register %" + f.reg_names[o.v] +
                                        " before writing it in this invocation");
                }
                return regs_[i];
            }
            case Operand::Kind::field: return data[o.v];
            case Operand::Kind::none: return 0;
            case Operand::Kind::var: break;
        }
        throw InternalError("unresolved operand in compiled code");
    };
    auto write = [&](const Operand& o, Value v) {
        if (o.kind == Operand::Kind::reg) {
            const std::size_t i = base + static_cast<std::size_t>(o.v);
            regs_[i] = v;
            defined_[i] = 1;
        } else if (o.kind == Operand::Kind::field) {
            data[o.v] = v;
        }
    };

    int b = block;
    for (;;) {
        if (visited) (*visited)[b >> 6] |= std::uint64_t{1} << (b & 63);
        const Block& blk = f.blocks[b];
        for (const Instr& in : blk.code) {
            ++cost_;
            switch (in.op) {
                case Opcode::mov: write(in.dst, read(in.src[0])); break;
                case Opcode::unary: write(in.dst, eval_unop(in.un, read(in.src[0]))); break;
                case Opcode::binary:
                    write(in.dst, eval_binop(in.bin, read(in.src[0]), read(in.src[1])));
                    break;
                case Opcode::builtin: {
                    Value v = 0;
                    const int buf = in.buffer >= 0 ? buffer_map_[in.buffer] : -1;
                    switch (in.builtin) {
                        case Builtin::load: v = buffers_.load(buf, read(in.src[0])); break;
                        case Builtin::store:
                            v = read(in.src[1]);
                            buffers_.store(buf, read(in.src[0]), v);
                            break;
                        case Builtin::atomic_add:
                            v = buffers_.atomic_add(buf, read(in.src[0]), read(in.src[1]));
                            break;
                        case Builtin::len: v = buffers_.len(buf); break;
                        case Builtin::min: v = std::min(read(in.src[0]), read(in.src[1])); break;
                        case Builtin::max: v = std::max(read(in.src[0]), read(in.src[1])); break;
                        case Builtin::lcg_next: v = lcg_next(read(in.src[0])); break;
                    }
                    write(in.dst, v);
                    break;
                }
                case Opcode::call: {
                    const IrFunction& callee = prog_.functions[in.callee];
                    if (depth + 1 >= kMaxCallDepth) {
                        throw TaskFault("helper call depth exceeds " + std::to_string(kMaxCallDepth));
                    }
                    const std::size_t nb = regs_.size();
                    regs_.resize(nb + callee.num_regs, 0);
                    defined_.resize(nb + callee.num_regs, 0);
                    for (std::size_t i = 0; i < in.src.size(); ++i) {
                        regs_[nb + i] = read(in.src[i]);
                        defined_[nb + i] = 1;
                    }
                    const Value v =
                        exec(callee, callee.state_entry[0], nb, nullptr, nullptr, depth + 1, nullptr);
                    regs_.resize(nb);
                    defined_.resize(nb);
                    write(in.dst, v);
                    break;
                }
                case Opcode::spawn: {
                    scratch_.clear();
                    for (const Operand& o : in.src) scratch_.push_back(read(o));
                    const Value q = in.queue.is_none() ? 0 : read(in.queue);
                    env->spawn(in.callee, scratch_, q, in.ordinal);
                    break;
                }
                case Opcode::load_result: write(in.dst, env->load_result(in.ordinal)); break;
            }
        }
        ++cost_;
        const Terminator& t = blk.term;
        switch (t.kind) {
            case Terminator::Kind::jump: b = t.target; break;
            case Terminator::Kind::branch: b = read(t.value) != 0 ? t.target : t.other; break;
            case Terminator::Kind::ret: {
                const Value v = read(t.value);
                if (action) {
                    if (f.layout.result_offset >= 0) data[f.layout.result_offset] = v;
                    *action = TaskAction::finish(v);
                }
                return v;
            }
            case Terminator::Kind::taskwait: {
                const Value q = t.value.is_none() ? 0 : read(t.value);
                *action = TaskAction::suspend(t.next_state, static_cast<int>(q));
                return 0;
            }
            case Terminator::Kind::none:
                throw InternalError("'" + f.name + "' fell into the exit block");
        }
    }
}

namespace {

class Reference {
public:
    Reference(const Program& p, BufferStore& bufs, ReferenceStats* stats)
        : prog_(p), bufs_(bufs), stats_(stats) {
        for (const auto& b : p.buffers) {
            const int id = bufs.find(b.name);
            if (id < 0) throw UsageError("program buffer '" + b.name + "' was not provided");
            map_.push_back(id);
        }
    }

    Value call(int fn, std::span<const Value> args, int depth) {
        const Function& f = prog_.functions[fn];
        if (depth > kMaxDepth) throw TaskFault("reference recursion too deep");
        if (stats_) ++(f.is_task ? stats_->task_calls : stats_->helper_calls);
        std::vector<Value> frame(f.vars.size(), 0);
        for (std::size_t i = 0; i < args.size(); ++i) frame[f.params[i]] = args[i];
        Value ret = 0;
        block(f.body, frame, ret, depth);
        return ret;
    }

private:
    static constexpr int kMaxDepth = 20000;

    // Returns true when a return statement executed.
    bool block(const std::vector<StmtPtr>& body, std::vector<Value>& fr, Value& ret, int depth) {
        for (const auto& s : body) {
            if (stmt(*s, fr, ret, depth)) return true;
        }
        return false;
    }

    bool stmt(const Stmt& s, std::vector<Value>& fr, Value& ret, int depth) {
        switch (s.kind) {
            case Stmt::Kind::let:
            case Stmt::Kind::assign: fr[s.var] = eval(*s.expr, fr, depth); return false;
            case Stmt::Kind::expr: eval(*s.expr, fr, depth); return false;
            case Stmt::Kind::block: return block(s.body, fr, ret, depth);
            case Stmt::Kind::if_:
                if (eval(*s.expr, fr, depth) != 0) return block(s.body, fr, ret, depth);
                return block(s.else_body, fr, ret, depth);
            case Stmt::Kind::while_:
                while (eval(*s.expr, fr, depth) != 0) {
                    if (block(s.body, fr, ret, depth)) return true;
                }
                return false;
            case Stmt::Kind::return_:
                ret = s.expr ? eval(*s.expr, fr, depth) : 0;
                return true;
            case Stmt::Kind::spawn: {
                std::vector<Value> args;
                for (const auto& a : s.expr->args) args.push_back(eval(*a, fr, depth));
                if (s.queue) eval(*s.queue, fr, depth);
                const Value v = call(s.expr->callee, args, depth + 1);
                if (s.var >= 0) fr[s.var] = v;
                return false;
            }
            case Stmt::Kind::taskwait:
                if (s.queue) eval(*s.queue, fr, depth);
                return false;
        }
        return false;
    }

    Value eval(const Expr& e, std::vector<Value>& fr, int depth) {
        switch (e.kind) {
            case Expr::Kind::literal: return e.value;
            case Expr::Kind::var: return fr[e.var];
            case Expr::Kind::unary: return eval_unop(e.un, eval(*e.args[0], fr, depth));
            case Expr::Kind::binary: {
                const Value a = eval(*e.args[0], fr, depth);
                if (e.bin == BinOp::land) return a != 0 && eval(*e.args[1], fr, depth) != 0;
                if (e.bin == BinOp::lor) return a != 0 || eval(*e.args[1], fr, depth) != 0;
                return eval_binop(e.bin, a, eval(*e.args[1], fr, depth));
            }
            case Expr::Kind::ternary:
                return eval(*e.args[0], fr, depth) != 0 ? eval(*e.args[1], fr, depth)
                                                        : eval(*e.args[2], fr, depth);
            case Expr::Kind::builtin: {
                std::vector<Value> a;
                for (const auto& x : e.args) a.push_back(eval(*x, fr, depth));
                const int buf = e.buffer >= 0 ? map_[e.buffer] : -1;
                switch (e.builtin) {
                    case Builtin::load: return bufs_.load(buf, a[0]);
                    case Builtin::store: bufs_.store(buf, a[0], a[1]); return a[1];
                    case Builtin::atomic_add: return bufs_.atomic_add(buf, a[0], a[1]);
                    case Builtin::len: return bufs_.len(buf);
                    case Builtin::min: return std::min(a[0], a[1]);
                    case Builtin::max: return std::max(a[0], a[1]);
                    case Builtin::lcg_next: return lcg_next(a[0]);
                }
                return 0;
            }
            case Expr::Kind::call: {
                std::vector<Value> a;
                for (const auto& x : e.args) a.push_back(eval(*x, fr, depth));
                return call(e.callee, a, depth + 1);
            }
        }
        return 0;
    }

    const Program& prog_;
    BufferStore& bufs_;
    ReferenceStats* stats_;
    std::vector<int> map_;
};

}  // namespace

Value reference_run(const Program& program, FnId fn, std::span<const Value> args,
                    BufferStore& buffers, ReferenceStats* stats) {
    if (fn < 0 || fn >= static_cast<int>(program.functions.size())) {
        throw UsageError("reference_run: unknown function");
    }
    if (static_cast<int>(args.size()) != program.functions[fn].arity()) {
        throw UsageError("reference_run: arity mismatch");
    }
    return Reference(program, buffers, stats).call(fn, args, 0);
}

}  // namespace sfj::taskc
