#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sfj/config.hpp"

namespace sfj::taskc {

struct Loc {
    int line = 1;
    int column = 1;
};

enum class BinOp { add, sub, mul, div, mod, shl, shr, lt, le, gt, ge, eq, ne, band, bor, bxor, land, lor };
enum class UnOp { neg, lnot, bnot };

enum class Builtin { load, store, atomic_add, len, min, max, lcg_next };

const char* to_string(BinOp op);
const char* to_string(UnOp op);
const char* to_string(Builtin b);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind { literal, var, unary, binary, ternary, builtin, call };

    Kind kind = Kind::literal;
    Loc loc;
    Value value = 0;       // literal
    std::string name;      // var name or callee name
    int var = -1;          // resolved variable
    UnOp un = UnOp::neg;
    BinOp bin = BinOp::add;
    Builtin builtin = Builtin::load;
    int buffer = -1;       // buffer operand of load/store/atomic_add/len
    int callee = -1;       // function index for calls
    std::vector<ExprPtr> args;  // operands in evaluation order
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Kind { let, assign, if_, while_, return_, spawn, taskwait, expr, block };

    Kind kind = Kind::expr;
    Loc loc;
    std::string name;  // let / assign / spawn binding target
    int var = -1;      // resolved target (-1 when a spawn has no binding)
    ExprPtr expr;      // initializer, value, condition, returned value, spawned call
    ExprPtr queue;     // spawn / taskwait queue clause
    std::vector<StmtPtr> body;
    std::vector<StmtPtr> else_body;
};

struct VarInfo {
    std::string name;
    Loc loc;
    bool is_param = false;
    bool is_temp = false;
};

struct Function {
    Loc loc;
    bool is_task = true;  // `task` vs. `fn` helper
    std::string name;
    std::vector<int> params;  // variable ids, in order
    std::vector<StmtPtr> body;
    std::vector<VarInfo> vars;
    bool returns_value = false;

    int arity() const { return static_cast<int>(params.size()); }
};

struct BufferDecl {
    std::string name;
    Loc loc;
};

struct ConstDecl {
    std::string name;
    Value value = 0;
    Loc loc;
};

struct Program {
    std::vector<BufferDecl> buffers;
    std::vector<ConstDecl> consts;
    std::vector<Function> functions;

    int find_function(const std::string& name) const;
    int find_buffer(const std::string& name) const;
};

}  // namespace sfj::taskc
