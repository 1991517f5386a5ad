#pragma once

#include <vector>

#include "sfj/taskc/ast.hpp"
#include "sfj/taskc/ir.hpp"

namespace sfj::taskc {

/// Control-flow graph of one function over variable operands. Block 0 is the entry,
/// block 1 the exit. Every taskwait is a block of its own with no instructions whose
/// single successor is its continuation block.
struct Cfg {
    static constexpr int kEntry = 0;
    static constexpr int kExit = 1;

    std::vector<Block> blocks;
    std::vector<int> taskwaits;       // taskwait blocks in source order
    std::vector<VarInfo> vars;        // program variables followed by temporaries
    std::vector<int> decl_block;      // per variable: block holding its declaration
    int fall_off_block = -1;          // block ending in the implicit return, if any

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int num_vars() const { return static_cast<int>(vars.size()); }
    std::vector<int> successors(int b) const;
    std::vector<std::vector<int>> successor_lists() const;
};

Cfg lower_to_cfg(const Program& program, const Function& fn);

/// Variables read / written by one instruction or terminator (variable operands only).
void instr_uses(const Instr& in, std::vector<int>& out);
int instr_def(const Instr& in);
void term_uses(const Terminator& t, std::vector<int>& out);

}  // namespace sfj::taskc
