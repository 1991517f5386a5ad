#pragma once

#include <map>
#include <string>
#include <vector>

#include "sfj/errors.hpp"
#include "sfj/taskc/ast.hpp"

namespace sfj::taskc {

struct CompileOptions {
    /// Overrides for `const` declarations; every key must name a declared constant.
    std::map<std::string, Value> consts;
    bool block_level = false;
    bool assume_no_taskwait = false;
    int max_task_data_size = 128;  // bytes
};

/// Resolves names in place: variables get ids, calls get callees or builtins,
/// constants are folded to literals. Returns all diagnostics found.
std::vector<Diagnostic> analyze(Program& program, const CompileOptions& options);

}  // namespace sfj::taskc
