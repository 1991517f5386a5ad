#include "sfj/taskc/sema.hpp"

#include <optional>
#include <set>
#include <unordered_map>

namespace sfj::taskc {
namespace {

struct BuiltinSig {
    const char* name;
    Builtin id;
    bool takes_buffer;
    int value_args;
};

constexpr BuiltinSig kBuiltins[] = {
    {"load", Builtin::load, true, 1},          {"store", Builtin::store, true, 2},
    {"atomic_add", Builtin::atomic_add, true, 2}, {"len", Builtin::len, true, 0},
    {"min", Builtin::min, false, 2},           {"max", Builtin::max, false, 2},
    {"lcg_next", Builtin::lcg_next, false, 1},
};

const BuiltinSig* find_builtin(const std::string& name) {
    for (const auto& b : kBuiltins) {
        if (name == b.name) return &b;
    }
    return nullptr;
}

class Analyzer {
public:
    Analyzer(Program& p, const CompileOptions& o) : prog_(p), opts_(o) {}

    std::vector<Diagnostic> run() {
        names();
        for (auto& [name, value] : opts_.consts) {
            auto it = consts_.find(name);
            if (it == consts_.end()) {
                error({1, 1}, "override for undeclared constant '" + name + "'");
            } else {
                it->second = value;
            }
        }
        for (auto& f : prog_.functions) function(f);
        return std::move(diags_);
    }

private:
    void error(Loc loc, std::string msg) {
        diags_.push_back(Diagnostic{loc.line, loc.column, std::move(msg)});
    }

    void names() {
        std::set<std::string> seen;
        auto claim = [&](const std::string& n, Loc loc, const char* what) {
            if (find_builtin(n)) {
                error(loc, std::string(what) + " '" + n + "' shadows a builtin");
            } else if (!seen.insert(n).second) {
                error(loc, "duplicate top-level name '" + n + "'");
            }
        };
        for (auto& b : prog_.buffers) claim(b.name, b.loc, "buffer");
        for (auto& c : prog_.consts) {
            claim(c.name, c.loc, "constant");
            consts_[c.name] = c.value;
        }
        for (auto& f : prog_.functions) claim(f.name, f.loc, "function");
    }

    void function(Function& f) {
        fn_ = &f;
        scopes_.clear();
        scopes_.emplace_back();
        for (int p : f.params) {
            const VarInfo& v = f.vars[p];
            if (!scopes_.back().emplace(v.name, p).second) {
                error(v.loc, "duplicate parameter '" + v.name + "'");
            }
        }
        saw_value_return_ = saw_bare_return_ = false;
        body(f.body);
        f.returns_value = saw_value_return_;
        if (saw_value_return_ && saw_bare_return_) {
            error(f.loc, "function '" + f.name + "' mixes 'return expr;' and bare 'return;'");
        }
    }

    void body(std::vector<StmtPtr>& stmts) {
        scopes_.emplace_back();
        for (auto& s : stmts) statement(*s);
        scopes_.pop_back();
    }

    std::optional<int> lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        return std::nullopt;
    }

    int assign_target(const std::string& name, Loc loc) {
        if (auto v = lookup(name)) return *v;
        if (consts_.count(name)) {
            error(loc, "cannot assign to constant '" + name + "'");
        } else if (prog_.find_buffer(name) >= 0) {
            error(loc, "cannot assign to buffer '" + name + "'");
        } else {
            error(loc, "assignment to undeclared variable '" + name + "'");
        }
        return -1;
    }

    void statement(Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::let: {
                expr(*s.expr);
                if (scopes_.back().count(s.name)) {
                    error(s.loc, "redeclaration of '" + s.name + "' in the same scope");
                }
                s.var = static_cast<int>(fn_->vars.size());
                fn_->vars.push_back(VarInfo{s.name, s.loc, false, false});
                scopes_.back()[s.name] = s.var;
                break;
            }
            case Stmt::Kind::assign:
                expr(*s.expr);
                s.var = assign_target(s.name, s.loc);
                break;
            case Stmt::Kind::if_:
                expr(*s.expr);
                body(s.body);
                body(s.else_body);
                break;
            case Stmt::Kind::while_:
                expr(*s.expr);
                body(s.body);
                break;
            case Stmt::Kind::return_:
                if (s.expr) {
                    expr(*s.expr);
                    saw_value_return_ = true;
                } else {
                    saw_bare_return_ = true;
                }
                break;
            case Stmt::Kind::spawn:
                spawn(s);
                break;
            case Stmt::Kind::taskwait:
                if (!fn_->is_task) error(s.loc, "taskwait inside helper function '" + fn_->name + "'");
                if (opts_.assume_no_taskwait) {
                    error(s.loc, "taskwait is not allowed when assume_no_taskwait is set");
                }
                queue_clause(s);
                break;
            case Stmt::Kind::expr:
                expr(*s.expr);
                break;
            case Stmt::Kind::block:
                body(s.body);
                break;
        }
    }

    void queue_clause(Stmt& s) {
        if (!s.queue) return;
        if (opts_.block_level) {
            error(s.queue->loc, "queue clause is not supported for block-level workers");
        }
        expr(*s.queue);
    }

    void spawn(Stmt& s) {
        if (!fn_->is_task) error(s.loc, "spawn inside helper function '" + fn_->name + "'");
        Expr& call = *s.expr;
        for (auto& a : call.args) expr(*a);
        call.callee = prog_.find_function(call.name);
        if (call.callee < 0 || !prog_.functions[call.callee].is_task) {
            error(call.loc, "spawn target '" + call.name + "' is not a task function");
        } else if (prog_.functions[call.callee].arity() != static_cast<int>(call.args.size())) {
            error(call.loc, "task '" + call.name + "' expects " +
                                std::to_string(prog_.functions[call.callee].arity()) +
                                " arguments");
        }
        if (!s.name.empty()) {
            s.var = assign_target(s.name, s.loc);
            if (opts_.assume_no_taskwait) {
                error(s.loc, "spawn result binding requires taskwait, which assume_no_taskwait forbids");
            }
        }
        queue_clause(s);
    }

    void expr(Expr& e) {
        switch (e.kind) {
            case Expr::Kind::literal:
                break;
            case Expr::Kind::var:
                if (auto v = lookup(e.name)) {
                    e.var = *v;
                } else if (auto c = consts_.find(e.name); c != consts_.end()) {
                    e.kind = Expr::Kind::literal;
                    e.value = c->second;
                } else if (prog_.find_buffer(e.name) >= 0) {
                    error(e.loc, "buffer '" + e.name + "' used as a value; use load()");
                } else {
                    error(e.loc, "use of undeclared variable '" + e.name + "'");
                }
                break;
            case Expr::Kind::unary:
            case Expr::Kind::binary:
            case Expr::Kind::ternary:
                for (auto& a : e.args) expr(*a);
                break;
            case Expr::Kind::builtin:
                break;
            case Expr::Kind::call:
                call(e);
                break;
        }
    }

    void call(Expr& e) {
        if (const BuiltinSig* b = find_builtin(e.name)) {
            e.kind = Expr::Kind::builtin;
            e.builtin = b->id;
            const std::size_t want = static_cast<std::size_t>(b->value_args) + (b->takes_buffer ? 1 : 0);
            if (e.args.size() != want) {
                error(e.loc, std::string(b->name) + " expects " + std::to_string(want) + " arguments");
                return;
            }
            if (b->takes_buffer) {
                Expr& first = *e.args.front();
                if (first.kind == Expr::Kind::var) e.buffer = prog_.find_buffer(first.name);
                if (e.buffer < 0) {
                    error(first.loc, std::string(b->name) + ": first argument must name a buffer");
                }
                e.args.erase(e.args.begin());
            }
            for (auto& a : e.args) expr(*a);
            return;
        }
        for (auto& a : e.args) expr(*a);
        e.callee = prog_.find_function(e.name);
        if (e.callee < 0) {
            error(e.loc, "call to undeclared function '" + e.name + "'");
            return;
        }
        const Function& target = prog_.functions[e.callee];
        if (target.is_task) {
            error(e.loc, "task function '" + e.name + "' can only be invoked through spawn");
        } else if (target.arity() != static_cast<int>(e.args.size())) {
            error(e.loc, "function '" + e.name + "' expects " + std::to_string(target.arity()) +
                             " arguments");
        }
    }

    Program& prog_;
    const CompileOptions& opts_;
    std::vector<Diagnostic> diags_;
    std::unordered_map<std::string, Value> consts_;
    Function* fn_ = nullptr;
    std::vector<std::unordered_map<std::string, int>> scopes_;
    bool saw_value_return_ = false;
    bool saw_bare_return_ = false;
};

}  // namespace

std::vector<Diagnostic> analyze(Program& program, const CompileOptions& options) {
    return Analyzer(program, options).run();
}

}  // namespace sfj::taskc
