#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "jade/vec2.hpp"

namespace jade {

/// Agent memory: named scalars, named positions, and a bounded history of
/// (tick, event name) pairs. Containers are ordered maps so iteration order,
/// and with it every checksum, is stable.
class Memory {
public:
    explicit Memory(std::size_t history_capacity = 64) : capacity_(history_capacity) {}

    void set(const std::string& name, double value) { scalars_[name] = value; }
    std::optional<double> get(const std::string& name) const {
        auto it = scalars_.find(name);
        if (it == scalars_.end()) return std::nullopt;
        return it->second;
    }
    bool has(const std::string& name) const { return scalars_.count(name) > 0; }

    void set_position(const std::string& name, const Vec2& p) { positions_[name] = p; }
    std::optional<Vec2> get_position(const std::string& name) const {
        auto it = positions_.find(name);
        if (it == positions_.end()) return std::nullopt;
        return it->second;
    }

    /// Appends to the history ring; evicts the oldest entry once full.
    void record(long long tick, const std::string& event) {
        if (capacity_ == 0) return;
        if (history_.size() == capacity_) history_.pop_front();
        history_.emplace_back(tick, event);
    }

    const std::map<std::string, double>& scalars() const { return scalars_; }
    const std::map<std::string, Vec2>& positions() const { return positions_; }
    const std::deque<std::pair<long long, std::string>>& history() const { return history_; }
    std::size_t history_capacity() const { return capacity_; }

private:
    std::map<std::string, double> scalars_;
    std::map<std::string, Vec2> positions_;
    std::deque<std::pair<long long, std::string>> history_;
    std::size_t capacity_;
};

}  // namespace jade
