#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfj {

/// Base of every error the runtime, compiler and harness raise.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class InvalidHandle : public Error {
public:
    using Error::Error;
};

class PoolExhausted : public Error {
public:
    explicit PoolExhausted(std::uint64_t capacity)
        : Error("task pool exhausted (capacity " + std::to_string(capacity) + ")"),
          capacity_(capacity) {}
    std::uint64_t capacity() const noexcept { return capacity_; }

private:
    std::uint64_t capacity_;
};

class QueueOverflow : public Error {
public:
    explicit QueueOverflow(std::uint64_t capacity)
        : Error("queue overflow (capacity " + std::to_string(capacity) + ")"),
          capacity_(capacity) {}
    std::uint64_t capacity() const noexcept { return capacity_; }

private:
    std::uint64_t capacity_;
};

class ChildLimitExceeded : public Error {
public:
    explicit ChildLimitExceeded(int limit)
        : Error("child task limit exceeded (max_child_tasks " + std::to_string(limit) + ")"),
          limit_(limit) {}
    int limit() const noexcept { return limit_; }

private:
    int limit_;
};

/// Outstanding tasks remain but no worker can make progress.
class LivenessFailure : public Error {
public:
    using Error::Error;
};

/// Faults raised while executing task code: bounds, division by zero, bad queue index.
class TaskFault : public Error {
public:
    using Error::Error;
};

/// Broken internal invariant (corrupted log, cyclic DAG, ...).
class InternalError : public Error {
public:
    using Error::Error;
};

struct Diagnostic {
    int line = 0;
    int column = 0;
    std::string message;

    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    }
};

class CompileError : public Error {
public:
    explicit CompileError(std::vector<Diagnostic> diags)
        : Error(join(diags)), diagnostics_(std::move(diags)) {}
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string join(const std::vector<Diagnostic>& diags) {
        std::string out;
        for (const auto& d : diags) {
            if (!out.empty()) out += '\n';
            out += d.to_string();
        }
        return out;
    }
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace sfj
