#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sfj/taskc/analysis.hpp"
#include "sfj/taskc/ast.hpp"
#include "sfj/taskc/cfg.hpp"
#include "sfj/taskc/ir.hpp"
#include "sfj/taskc/sema.hpp"

namespace sfj::taskc {

/// Everything the compiler computed, per function, for inspection and tests.
struct CompileResult {
    Program ast;
    IrProgram ir;
    std::vector<Cfg> cfgs;              // after result loads were inserted
    std::vector<LivenessResult> live;
    std::vector<VarSet> spills;
};

/// Throws CompileError with every diagnostic collected.
CompileResult compile(std::string_view source, const CompileOptions& options = {});
IrProgram compile_program(std::string_view source, const CompileOptions& options = {});

std::string print_cfg(const Cfg& cfg, const LivenessResult* live = nullptr);

}  // namespace sfj::taskc
