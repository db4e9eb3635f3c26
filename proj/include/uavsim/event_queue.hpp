#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "uavsim/types.hpp"

namespace uavsim {

enum class EventKind { PacketGeneration, MobilityTick, UavReposition, UavBeacon, ConsensusRound, MetricsSnapshot };

struct Event {
    SimTime time = 0;
    EventKind kind = EventKind::MobilityTick;
    EntityId subject = 0;
    std::uint64_t sequence = 0;
};

/// Min-queue over (time, insertion sequence). Events scheduled for the same
/// instant pop in the order they were pushed.
class EventQueue {
public:
    SimTime now() const noexcept { return now_; }
    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }

    void schedule(SimTime at, EventKind kind, EntityId subject = 0) {
        if (at < now_) throw std::logic_error("event scheduled in the past");
        heap_.push(Event{at, kind, subject, next_sequence_++});
    }

    /// Pops the next event and advances the clock to it.
    std::optional<Event> pop() {
        if (heap_.empty()) return std::nullopt;
        Event e = heap_.top();
        heap_.pop();
        now_ = e.time;
        return e;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    SimTime now_ = 0;
    std::uint64_t next_sequence_ = 0;
};

}  // namespace uavsim
