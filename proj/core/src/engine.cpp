#include "leolora/simcore/engine.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace leolora::simcore {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::BeaconEpoch: return "BeaconEpoch";
    case EventKind::TxSignal: return "TxSignal";
    case EventKind::AppPacket: return "AppPacket";
    case EventKind::TxEnd: return "TxEnd";
    case EventKind::RxResolve: return "RxResolve";
    }
    return "Unknown";
}

double RngStream::uniform(double lo, double hi)
{
    if (lo > hi) {
        throw std::invalid_argument("uniform: lo > hi");
    }
    if (lo == hi) {
        return lo;
    }
    const double x = lo + (hi - lo) * uniform01();
    return x < hi ? x : std::nextafter(hi, lo);
}

Engine::Engine(Dispatcher dispatcher) : dispatcher_(std::move(dispatcher))
{
    if (!dispatcher_) {
        throw std::invalid_argument("Engine requires a dispatcher");
    }
}

EventHandle Engine::schedule(SimTime fire_time, EntityId target, EventKind kind, std::uint64_t payload)
{
    if (fire_time < now_) {
        throw std::logic_error("Engine::schedule: event at " + std::to_string(fire_time.ns()) +
                               " ns is before the clock (" + std::to_string(now_.ns()) + " ns)");
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{fire_time, seq, target, kind, payload});
    live_.push_back(true);
    ++live_count_;
    return EventHandle{seq};
}

bool Engine::cancel(EventHandle handle)
{
    if (handle.seq >= live_.size() || !live_[handle.seq]) {
        return false;
    }
    live_[handle.seq] = false;
    --live_count_;
    return true;
}

std::uint64_t Engine::run_until(SimTime t_end)
{
    if (t_end < now_) {
        throw std::logic_error("Engine::run_until: target time is before the clock");
    }
    std::uint64_t processed = 0;
    while (!queue_.empty() && queue_.top().fire_time <= t_end) {
        const Event ev = queue_.top();
        queue_.pop();
        if (!live_[ev.seq]) {
            continue;
        }
        live_[ev.seq] = false;
        --live_count_;
        now_ = ev.fire_time;
        if (trace_ != nullptr) {
            *trace_ << R"({"t_ns":)" << ev.fire_time.ns() << R"(,"entity":)" << ev.target << R"(,"kind":")"
                    << to_string(ev.kind) << "\"}\n";
        }
        dispatcher_(ev);
        ++processed;
    }
    now_ = t_end;
    return processed;
}

} // namespace leolora::simcore
