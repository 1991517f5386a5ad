#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfj/buffers.hpp"
#include "sfj/task_core.hpp"
#include "sfj/taskc/ast.hpp"
#include "sfj/taskc/ir.hpp"

namespace sfj::taskc {

/// What a running invocation needs from its host runtime.
class ExecEnv {
public:
    virtual ~ExecEnv() = default;
    /// The task's record data (layout fields).
    virtual std::span<Value> task_data() = 0;
    virtual Value load_result(int ordinal) = 0;
    /// `ordinal` is the compiler's static child ordinal, or -1 when unbound.
    virtual void spawn(FnId fn, std::span<const Value> args, Value queue, int ordinal) = 0;
};

struct ExecResult {
    TaskAction action;
    std::uint64_t cost = 0;      // instructions and terminators retired
    std::uint64_t path_tag = 0;  // hash of the set of task blocks executed
};

/// Executes one state of a compiled task. Holds scratch registers, so use one
/// instance per worker thread.
class IrInterpreter {
public:
    static constexpr int kMaxCallDepth = 4096;

    /// Buffers are bound by name; every program buffer must exist in `buffers`.
    IrInterpreter(const IrProgram& program, BufferStore& buffers);

    ExecResult run(FnId fn, int state, ExecEnv& env);

private:
    Value exec(const IrFunction& f, int block, std::size_t base, ExecEnv* env, TaskAction* action,
               int depth, std::vector<std::uint64_t>* visited);

    const IrProgram& prog_;
    BufferStore& buffers_;
    std::vector<int> buffer_map_;
    std::vector<Value> regs_;
    std::vector<std::uint8_t> defined_;
    std::vector<Value> scratch_;
    std::uint64_t cost_ = 0;
};

struct ReferenceStats {
    std::uint64_t task_calls = 0;
    std::uint64_t helper_calls = 0;
};

/// Direct AST evaluation: spawn is an immediate call and taskwait does nothing.
/// Expects a program that went through `analyze`.
Value reference_run(const Program& program, FnId fn, std::span<const Value> args,
                    BufferStore& buffers, ReferenceStats* stats = nullptr);

}  // namespace sfj::taskc
