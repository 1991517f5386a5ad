#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "sfj/config.hpp"

namespace sfj {

/// Named 64-bit arrays shared by all tasks of a run. Element accesses are relaxed
/// atomics, so racing tasks never tear values; ordering comes from the join protocol.
class BufferStore {
public:
    int add(std::string name, std::vector<Value> init);
    int find(const std::string& name) const;
    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int buf) const { return names_[buf]; }

    Value load(int buf, Value index) const;
    void store(int buf, Value index, Value v);
    Value atomic_add(int buf, Value index, Value v);  // returns the previous value
    Value len(int buf) const { return static_cast<Value>(data_[buf].size()); }

    std::vector<Value>& data(int buf) { return data_[buf]; }
    const std::vector<Value>& data(int buf) const { return data_[buf]; }
    std::vector<Value>& data(const std::string& name);
    const std::vector<Value>& data(const std::string& name) const;

private:
    std::size_t checked(int buf, Value index, const char* op) const;

    std::vector<std::string> names_;
    std::vector<std::vector<Value>> data_;
};

}  // namespace sfj
