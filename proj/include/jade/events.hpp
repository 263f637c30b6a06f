#pragma once

#include <string>
#include <variant>

#include "jade/vec2.hpp"

namespace jade {

/// Where an event came from. Recorded for logging/trace purposes; the CSM
/// semantics never branch on it.
enum class EventOrigin { Sensor, Machine, Message, Strategy };

using EventPayload = std::variant<std::monostate, double, Vec2>;

struct EventInstance {
    std::string name;
    EventPayload payload{};
    EventOrigin origin = EventOrigin::Sensor;

    bool has_payload() const { return !std::holds_alternative<std::monostate>(payload); }
};

/// The per-step event collection. Order is insertion order; a trigger match
/// takes the first instance with that name.
using EventSet = std::vector<EventInstance>;

inline const EventInstance* find_event(const EventSet& events, const std::string& name) {
    for (const auto& e : events)
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace jade
