#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>

namespace leolora::simcore {

/// Signed interval in integer nanoseconds.
class Duration {
public:
    constexpr Duration() = default;

    static constexpr Duration from_ns(std::int64_t ns) { return Duration{ns}; }
    static constexpr Duration from_ms(std::int64_t ms) { return Duration{ms * 1'000'000}; }
    /// Rounds to the nearest nanosecond.
    static Duration from_seconds(double s) { return Duration{static_cast<std::int64_t>(std::llround(s * 1e9))}; }

    constexpr std::int64_t ns() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

    constexpr auto operator<=>(const Duration&) const = default;

    constexpr Duration operator+(Duration o) const { return Duration{ns_ + o.ns_}; }
    constexpr Duration operator-(Duration o) const { return Duration{ns_ - o.ns_}; }
    constexpr Duration operator*(std::int64_t k) const { return Duration{ns_ * k}; }
    constexpr Duration& operator+=(Duration o) { ns_ += o.ns_; return *this; }

private:
    constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

/// Absolute simulation time, nanoseconds since the scenario epoch. Never negative.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ns(std::int64_t ns) { return SimTime{checked(ns)}; }
    static SimTime from_seconds(double s) { return SimTime{checked(std::llround(s * 1e9))}; }
    static constexpr SimTime zero() { return SimTime{}; }

    constexpr std::int64_t ns() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(Duration d) const { return SimTime{checked(ns_ + d.ns())}; }
    constexpr SimTime operator-(Duration d) const { return SimTime{checked(ns_ - d.ns())}; }
    constexpr Duration operator-(SimTime o) const { return Duration::from_ns(ns_ - o.ns_); }

private:
    constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
    static constexpr std::int64_t checked(std::int64_t ns)
    {
        if (ns < 0) {
            throw std::domain_error("SimTime cannot be negative");
        }
        return ns;
    }
    std::int64_t ns_ = 0;
};

namespace literals {
constexpr Duration operator""_s(unsigned long long s) { return Duration::from_ns(static_cast<std::int64_t>(s) * 1'000'000'000); }
constexpr Duration operator""_ms(unsigned long long ms) { return Duration::from_ms(static_cast<std::int64_t>(ms)); }
} // namespace literals

} // namespace leolora::simcore
