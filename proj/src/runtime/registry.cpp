#include "sfj/errors.hpp"
#include "sfj/runtime.hpp"

namespace sfj {

TaskRegistry::TaskRegistry(std::shared_ptr<const taskc::IrProgram> program)
    : program_(std::move(program)) {
    if (!program_) return;
    for (const auto& f : program_->functions) {
        entries_.push_back({f.name, f.arity, f.is_task, {}});
    }
}

FnId TaskRegistry::add_native(std::string name, int arity, NativeTaskFn fn) {
    if (find(name)) throw UsageError("task function '" + name + "' is already registered");
    if (!fn) throw UsageError("native task '" + name + "' has no body");
    if (arity < 0) throw UsageError("native task '" + name + "' has a negative arity");
    entries_.push_back({std::move(name), arity, true, std::move(fn)});
    return static_cast<FnId>(entries_.size() - 1);
}

std::optional<FnId> TaskRegistry::find(std::string_view name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) return static_cast<FnId>(i);
    }
    return std::nullopt;
}

FnId TaskRegistry::id(std::string_view name) const {
    auto f = find(name);
    if (!f) throw UsageError("unknown task function '" + std::string(name) + "'");
    return *f;
}

namespace {
void check_fn(FnId fn, int size) {
    if (fn < 0 || fn >= size) throw UsageError("unknown function id " + std::to_string(fn));
}
}  // namespace

int TaskRegistry::arity(FnId fn) const {
    check_fn(fn, size());
    return entries_[fn].arity;
}

const std::string& TaskRegistry::name(FnId fn) const {
    check_fn(fn, size());
    return entries_[fn].name;
}

bool TaskRegistry::is_native(FnId fn) const {
    check_fn(fn, size());
    return static_cast<bool>(entries_[fn].native);
}

bool TaskRegistry::is_task(FnId fn) const {
    check_fn(fn, size());
    return entries_[fn].task;
}

const NativeTaskFn& TaskRegistry::native(FnId fn) const {
    if (!is_native(fn)) throw UsageError("function " + std::to_string(fn) + " is not native");
    return entries_[fn].native;
}

std::optional<WorkerId> select_victim(WorkerId self, int workers, Rng& rng) {
    if (workers < 2) return std::nullopt;
    auto v = static_cast<WorkerId>(rng.below(static_cast<std::uint64_t>(workers - 1)));
    return v >= self ? v + 1 : v;
}

}  // namespace sfj
