#include "sfj/taskc/cfg.hpp"

namespace sfj::taskc {

std::vector<int> Cfg::successors(int b) const {
    const Terminator& t = blocks[b].term;
    switch (t.kind) {
        case Terminator::Kind::none: return {};
        case Terminator::Kind::jump:
        case Terminator::Kind::taskwait: return {t.target};
        case Terminator::Kind::branch:
            if (t.target == t.other) return {t.target};
            return {t.target, t.other};
        case Terminator::Kind::ret: return {kExit};
    }
    return {};
}

std::vector<std::vector<int>> Cfg::successor_lists() const {
    std::vector<std::vector<int>> s(blocks.size());
    for (int b = 0; b < num_blocks(); ++b) s[b] = successors(b);
    return s;
}

void instr_uses(const Instr& in, std::vector<int>& out) {
    for (const Operand& o : in.src) {
        if (o.is_var()) out.push_back(static_cast<int>(o.v));
    }
    if (in.queue.is_var()) out.push_back(static_cast<int>(in.queue.v));
}

int instr_def(const Instr& in) { return in.dst.is_var() ? static_cast<int>(in.dst.v) : -1; }

void term_uses(const Terminator& t, std::vector<int>& out) {
    if (t.value.is_var()) out.push_back(static_cast<int>(t.value.v));
}

namespace {

class Lowerer {
public:
    Lowerer(const Program& p, const Function& f) : prog_(p), fn_(f) {
        cfg_.vars = f.vars;
        cfg_.decl_block.assign(f.vars.size(), Cfg::kEntry);
        new_block();  // entry
        new_block();  // exit
        cur_ = new_block();
        cfg_.blocks[Cfg::kEntry].term = jump(cur_);
    }

    Cfg run() {
        stmts(fn_.body);
        Terminator t;
        t.kind = Terminator::Kind::ret;
        t.loc = fn_.loc;
        if (fn_.returns_value) {
            t.value = Operand::imm(0);
            cfg_.fall_off_block = cur_;
        }
        cfg_.blocks[cur_].term = t;
        prune();
        return std::move(cfg_);
    }

private:
    // Drops blocks that only exist because code follows a return. Taskwait nodes and
    // their continuations are kept so state numbering never depends on reachability.
    void prune() {
        const int n = cfg_.num_blocks();
        std::vector<char> keep(n, 0);
        std::vector<int> work = {Cfg::kEntry, Cfg::kExit};
        for (int t : cfg_.taskwaits) work.push_back(t);
        while (!work.empty()) {
            const int b = work.back();
            work.pop_back();
            if (keep[b]) continue;
            keep[b] = 1;
            for (int s : cfg_.successors(b)) work.push_back(s);
        }
        std::vector<int> remap(n, -1);
        std::vector<Block> kept;
        for (int b = 0; b < n; ++b) {
            if (!keep[b]) continue;
            remap[b] = static_cast<int>(kept.size());
            kept.push_back(std::move(cfg_.blocks[b]));
        }
        auto fix = [&](int& b) {
            if (b >= 0) b = remap[b];
        };
        for (Block& b : kept) {
            fix(b.term.target);
            fix(b.term.other);
        }
        for (int& t : cfg_.taskwaits) fix(t);
        for (int& d : cfg_.decl_block) {
            d = d >= 0 && remap[d] >= 0 ? remap[d] : -1;
        }
        fix(cfg_.fall_off_block);
        cfg_.blocks = std::move(kept);
    }

    int new_block() {
        cfg_.blocks.emplace_back();
        return static_cast<int>(cfg_.blocks.size()) - 1;
    }

    static Terminator jump(int target) {
        Terminator t;
        t.kind = Terminator::Kind::jump;
        t.target = target;
        return t;
    }

    void finish(Terminator t, int next) {
        cfg_.blocks[cur_].term = t;
        cur_ = next;
    }

    int temp() {
        const int id = static_cast<int>(cfg_.vars.size());
        VarInfo v;
        v.name = "t" + std::to_string(next_temp_++);
        v.is_temp = true;
        cfg_.vars.push_back(v);
        cfg_.decl_block.push_back(cur_);
        return id;
    }

    void emit(Instr in) { cfg_.blocks[cur_].code.push_back(std::move(in)); }

    void stmts(const std::vector<StmtPtr>& list) {
        for (const auto& s : list) stmt(*s);
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::let:
                cfg_.decl_block[s.var] = cur_;
                eval_into(*s.expr, s.var);
                break;
            case Stmt::Kind::assign:
                eval_into(*s.expr, s.var);
                break;
            case Stmt::Kind::expr:
                eval(*s.expr);
                break;
            case Stmt::Kind::block:
                stmts(s.body);
                break;
            case Stmt::Kind::if_: {
                Operand c = eval(*s.expr);
                const int then_b = new_block();
                const int else_b = s.else_body.empty() ? -1 : new_block();
                const int join = new_block();
                branch(c, then_b, else_b < 0 ? join : else_b, s.loc);
                cur_ = then_b;
                stmts(s.body);
                if (else_b >= 0) {
                    finish(jump(join), else_b);
                    stmts(s.else_body);
                }
                finish(jump(join), join);
                break;
            }
            case Stmt::Kind::while_: {
                const int head = new_block();
                finish(jump(head), head);
                Operand c = eval(*s.expr);
                const int body = new_block();
                const int exit = new_block();
                branch(c, body, exit, s.loc);
                cur_ = body;
                stmts(s.body);
                finish(jump(head), exit);
                break;
            }
            case Stmt::Kind::return_: {
                Terminator t;
                t.kind = Terminator::Kind::ret;
                t.loc = s.loc;
                if (s.expr) t.value = eval(*s.expr);
                finish(t, new_block());
                break;
            }
            case Stmt::Kind::spawn: {
                Instr in;
                in.op = Opcode::spawn;
                in.loc = s.loc;
                in.callee = s.expr->callee;
                for (const auto& a : s.expr->args) in.src.push_back(eval(*a));
                if (s.queue) in.queue = eval(*s.queue);
                in.bind_var = s.var;
                emit(std::move(in));
                break;
            }
            case Stmt::Kind::taskwait: {
                Terminator t;
                t.kind = Terminator::Kind::taskwait;
                t.loc = s.loc;
                if (s.queue) t.value = eval(*s.queue);
                const int node = new_block();
                finish(jump(node), node);
                const int cont = new_block();
                t.target = cont;
                t.next_state = static_cast<int>(cfg_.taskwaits.size()) + 1;
                cfg_.taskwaits.push_back(node);
                finish(t, cont);
                break;
            }
        }
    }

    void branch(Operand c, int t, int f, Loc loc) {
        Terminator term;
        term.kind = Terminator::Kind::branch;
        term.value = c;
        term.target = t;
        term.other = f;
        term.loc = loc;
        cfg_.blocks[cur_].term = term;
    }

    /// Evaluates `e` and returns an operand holding its value.
    Operand eval(const Expr& e) {
        if (e.kind == Expr::Kind::literal) return Operand::imm(e.value);
        if (e.kind == Expr::Kind::var) return Operand::var(e.var);
        const int t = temp();
        eval_into(e, t);
        return Operand::var(t);
    }

    /// Evaluates `e` into variable `dst`.
    void eval_into(const Expr& e, int dst) {
        Instr in;
        in.loc = e.loc;
        in.dst = Operand::var(dst);
        switch (e.kind) {
            case Expr::Kind::literal:
            case Expr::Kind::var:
                in.op = Opcode::mov;
                in.src.push_back(eval(e));
                break;
            case Expr::Kind::unary:
                in.op = Opcode::unary;
                in.un = e.un;
                in.src.push_back(eval(*e.args[0]));
                break;
            case Expr::Kind::binary:
                if (e.bin == BinOp::land || e.bin == BinOp::lor) {
                    logical(e, dst);
                    return;
                }
                in.op = Opcode::binary;
                in.bin = e.bin;
                in.src.push_back(eval(*e.args[0]));
                in.src.push_back(eval(*e.args[1]));
                break;
            case Expr::Kind::ternary: {
                Operand c = eval(*e.args[0]);
                const int tb = new_block();
                const int fb = new_block();
                const int join = new_block();
                branch(c, tb, fb, e.loc);
                cur_ = tb;
                eval_into(*e.args[1], dst);
                finish(jump(join), fb);
                eval_into(*e.args[2], dst);
                finish(jump(join), join);
                return;
            }
            case Expr::Kind::builtin:
                in.op = Opcode::builtin;
                in.builtin = e.builtin;
                in.buffer = e.buffer;
                for (const auto& a : e.args) in.src.push_back(eval(*a));
                break;
            case Expr::Kind::call:
                in.op = Opcode::call;
                in.callee = e.callee;
                for (const auto& a : e.args) in.src.push_back(eval(*a));
                break;
        }
        emit(std::move(in));
    }

    // a && b  ->  dst = a != 0; if (dst) dst = b != 0
    // a || b  ->  dst = a != 0; if (!dst) dst = b != 0
    void logical(const Expr& e, int dst) {
        auto truth = [&](Operand v) {
            Instr in;
            in.op = Opcode::binary;
            in.bin = BinOp::ne;
            in.dst = Operand::var(dst);
            in.src = {v, Operand::imm(0)};
            in.loc = e.loc;
            emit(std::move(in));
        };
        truth(eval(*e.args[0]));
        const int rhs = new_block();
        const int join = new_block();
        if (e.bin == BinOp::land) {
            branch(Operand::var(dst), rhs, join, e.loc);
        } else {
            branch(Operand::var(dst), join, rhs, e.loc);
        }
        cur_ = rhs;
        truth(eval(*e.args[1]));
        finish(jump(join), join);
    }

    const Program& prog_;
    const Function& fn_;
    Cfg cfg_;
    int cur_ = 0;
    int next_temp_ = 0;
};

}  // namespace

Cfg lower_to_cfg(const Program& program, const Function& fn) { return Lowerer(program, fn).run(); }

}  // namespace sfj::taskc
