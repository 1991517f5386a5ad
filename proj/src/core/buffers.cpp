#include "sfj/buffers.hpp"

#include "sfj/errors.hpp"

namespace sfj {

int BufferStore::add(std::string name, std::vector<Value> init) {
    if (int b = find(name); b >= 0) {
        data_[b] = std::move(init);
        return b;
    }
    names_.push_back(std::move(name));
    data_.push_back(std::move(init));
    return size() - 1;
}

int BufferStore::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i) {
        if (names_[i] == name) return i;
    }
    return -1;
}

std::vector<Value>& BufferStore::data(const std::string& name) {
    const int b = find(name);
    if (b < 0) throw UsageError("unknown buffer '" + name + "'");
    return data_[b];
}

const std::vector<Value>& BufferStore::data(const std::string& name) const {
    const int b = find(name);
    if (b < 0) throw UsageError("unknown buffer '" + name + "'");
    return data_[b];
}

std::size_t BufferStore::checked(int buf, Value index, const char* op) const {
    if (buf < 0 || buf >= size()) throw TaskFault(std::string(op) + ": unknown buffer");
    if (index < 0 || index >= static_cast<Value>(data_[buf].size())) {
        throw TaskFault(std::string(op) + "(" + names_[buf] + ", " + std::to_string(index) +
                        "): index out of bounds (length " + std::to_string(data_[buf].size()) +
                        ")");
    }
    return static_cast<std::size_t>(index);
}

Value BufferStore::load(int buf, Value index) const {
    const std::size_t i = checked(buf, index, "load");
    return std::atomic_ref<Value>(const_cast<Value&>(data_[buf][i])).load(std::memory_order_relaxed);
}

void BufferStore::store(int buf, Value index, Value v) {
    const std::size_t i = checked(buf, index, "store");
    std::atomic_ref<Value>(data_[buf][i]).store(v, std::memory_order_relaxed);
}

Value BufferStore::atomic_add(int buf, Value index, Value v) {
    const std::size_t i = checked(buf, index, "atomic_add");
    return std::atomic_ref<Value>(data_[buf][i]).fetch_add(v, std::memory_order_relaxed);
}

}  // namespace sfj
