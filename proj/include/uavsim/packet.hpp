#pragma once

#include <cstdint>
#include <vector>

#include "uavsim/types.hpp"

namespace uavsim {

enum class Outcome { Pending, DeliveredAuthentic, DeliveredCompromised, Dropped };

struct Packet {
    std::uint64_t id = 0;
    EntityId src = 0;
    EntityId dst = 0;
    int size_bytes = 0;
    double created_at_s = 0.0;
    std::vector<EntityId> hop_trace;
    Outcome outcome = Outcome::Pending;

    /// Moves Pending to a terminal outcome; a second transition throws.
    void settle(Outcome terminal);
};

}  // namespace uavsim
