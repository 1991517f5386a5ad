#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfj/taskc/ast.hpp"

namespace sfj::taskc {

/// Instruction operand. `var` is used while building the CFG; finalized IR uses
/// `reg` (per-invocation register) or `field` (word offset into the task data).
struct Operand {
    enum class Kind : std::uint8_t { none, imm, var, reg, field };
    Kind kind = Kind::none;
    Value v = 0;

    static Operand imm(Value x) { return {Kind::imm, x}; }
    static Operand var(int id) { return {Kind::var, id}; }
    static Operand reg(int r) { return {Kind::reg, r}; }
    static Operand field(int off) { return {Kind::field, off}; }

    bool is_none() const { return kind == Kind::none; }
    bool is_var() const { return kind == Kind::var; }
    friend bool operator==(const Operand&, const Operand&) = default;
};

enum class Opcode : std::uint8_t {
    mov,          // dst = src0
    unary,        // dst = un src0
    binary,       // dst = src0 bin src1
    builtin,      // dst = builtin(buffer?, src...)
    call,         // dst = helper(src...)
    spawn,        // spawn task callee(src...) queue(queue)
    load_result,  // dst = child result `ordinal` of the joined epoch
};

struct Instr {
    Opcode op = Opcode::mov;
    Operand dst;
    std::vector<Operand> src;
    UnOp un = UnOp::neg;
    BinOp bin = BinOp::add;
    Builtin builtin = Builtin::load;
    int buffer = -1;
    int callee = -1;
    int ordinal = -1;    // spawn: static child ordinal when bound; load_result: ordinal read
    int bind_var = -1;   // spawn: variable receiving the result at the next join
    Operand queue;       // spawn queue clause (none = queue 0)
    Loc loc;
};

struct Terminator {
    enum class Kind : std::uint8_t {
        none,      // exit block
        jump,      // -> target
        branch,    // value != 0 ? target : other
        ret,       // return value (none for void); CFG edge to exit
        taskwait,  // join; sole successor is `target` (the continuation)
    };
    Kind kind = Kind::none;
    Operand value;  // branch condition, returned value, or taskwait queue clause
    int target = -1;
    int other = -1;
    int next_state = 0;  // taskwait: resumption state
    Loc loc;
};

struct Block {
    std::vector<Instr> code;
    Terminator term;
};

struct LayoutField {
    enum class Kind { arg, spill, result };
    std::string name;
    Kind kind = Kind::arg;
    int var = -1;  // source variable (-1 for the result field)
    int offset = 0;  // in words
};

struct TaskDataLayout {
    std::vector<LayoutField> fields;
    int result_offset = -1;

    int size_bytes() const { return static_cast<int>(fields.size()) * 8; }
    int words() const { return static_cast<int>(fields.size()); }
};

/// One compiled function. Blocks are shared by all states; `state_entry[k]` is the
/// block execution starts at when the task's state is k. Block 0 is the CFG entry
/// and block 1 the exit.
struct IrFunction {
    std::string name;
    bool is_task = true;
    int arity = 0;
    bool returns_value = false;
    int num_regs = 0;
    std::vector<Block> blocks;
    std::vector<int> state_entry;
    TaskDataLayout layout;
    std::vector<std::string> reg_names;

    int num_states() const { return static_cast<int>(state_entry.size()); }
};

struct IrProgram {
    std::vector<IrFunction> functions;  // same indices as the source program
    std::vector<std::string> buffers;
    bool assume_no_taskwait = false;
    bool block_level = false;

    int find_function(const std::string& name) const;
    int find_buffer(const std::string& name) const;
};

std::string print_function(const IrFunction& f, const IrProgram& p);
std::string print_program(const IrProgram& p);
std::string print_layout(const IrFunction& f);

}  // namespace sfj::taskc
