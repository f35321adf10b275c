#pragma once

#include "leolora/simcore/rng.hpp"
#include "leolora/simcore/time.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string_view>
#include <vector>

namespace leolora::simcore {

enum class EventKind : std::uint8_t {
    BeaconEpoch,
    TxSignal,
    AppPacket,
    TxEnd,
    RxResolve,
};

std::string_view to_string(EventKind kind);

struct Event {
    SimTime fire_time;
    std::uint64_t seq = 0;
    EntityId target = 0;
    EventKind kind = EventKind::BeaconEpoch;
    std::uint64_t payload = 0;
};

/// Identifies a scheduled event for cancellation.
struct EventHandle {
    std::uint64_t seq = 0;
    friend constexpr bool operator==(EventHandle, EventHandle) = default;
};

/// Single-threaded discrete-event engine.
///
/// Events are processed in (fire_time, seq) order; seq is the insertion
/// counter, so simultaneous events fire in the order they were scheduled.
/// Cancelled events are tombstoned and skipped when they reach the front.
class Engine {
public:
    using Dispatcher = std::function<void(const Event&)>;

    explicit Engine(Dispatcher dispatcher);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SimTime now() const { return now_; }

    /// Throws std::logic_error when fire_time is earlier than now().
    EventHandle schedule(SimTime fire_time, EntityId target, EventKind kind, std::uint64_t payload = 0);

    /// Returns false if the event already fired or was already cancelled.
    bool cancel(EventHandle handle);

    /// Processes every event with fire_time <= t_end, then advances the clock to t_end.
    std::uint64_t run_until(SimTime t_end);

    std::size_t pending() const { return live_count_; }

    /// Writes one JSON object per processed event to `sink`; nullptr disables.
    void set_trace(std::ostream* sink) { trace_ = sink; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.fire_time != b.fire_time) {
                return a.fire_time > b.fire_time;
            }
            return a.seq > b.seq;
        }
    };

    Dispatcher dispatcher_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::vector<bool> live_; // indexed by seq
    std::size_t live_count_ = 0;
    std::uint64_t next_seq_ = 0;
    SimTime now_;
    std::ostream* trace_ = nullptr;
};

} // namespace leolora::simcore
