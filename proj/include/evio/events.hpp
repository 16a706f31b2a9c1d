#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "evio/error.hpp"

namespace evio {

/// 2-D point in sensor pixel coordinates.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Sign of a brightness change.
enum class Polarity : std::uint8_t { Negative = 0, Positive = 1 };

/// Arithmetic value of a polarity: -1 or +1.
inline int polarity_sign(Polarity p) { return p == Polarity::Positive ? +1 : -1; }

/// One DVS event. Timestamps are integer microseconds since recording
/// start; there is no floating-point time anywhere in the toolkit.
struct Event {
    std::uint64_t t_us = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Polarity p = Polarity::Positive;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Time-sorted event sequence plus the sensor geometry it was recorded on.
/// Treat as immutable after construction; safe to share across threads.
struct EventStream {
    std::vector<Event> events;
    std::uint16_t sensor_width = 0;
    std::uint16_t sensor_height = 0;

    bool empty() const { return events.empty(); }
    std::size_t size() const { return events.size(); }

    /// t_max - t_min, 0 for streams with fewer than two events.
    std::uint64_t time_span_us() const {
        return events.size() < 2 ? 0 : events.back().t_us - events.front().t_us;
    }

    friend bool operator==(const EventStream&, const EventStream&) = default;
};

constexpr std::uint64_t kLabelPeriodUs = 10'000;  // 100 Hz ground-truth grid

/// One ground-truth annotation: pupil center plus blink flag.
/// Invariant: t_us == index * 10'000.
struct Label {
    std::uint32_t index = 0;
    std::uint64_t t_us = 0;
    double x = 0.0;
    double y = 0.0;
    bool blink = false;

    friend bool operator==(const Label&, const Label&) = default;
};

/// 100 Hz annotation sequence with consecutive indices. Tracks produced by
/// temporal-shift augmentation may start at a nonzero index; everything else
/// starts at 0.
struct LabelTrack {
    std::vector<Label> labels;
    static constexpr int rate_hz = 100;

    bool empty() const { return labels.empty(); }
    std::size_t size() const { return labels.size(); }

    friend bool operator==(const LabelTrack&, const LabelTrack&) = default;
};

/// Predicted pupil positions, aligned 1:1 with the labels of the evaluation
/// target. Flows from trackers through post-processing into metrics.
struct Trajectory {
    std::vector<Vec2> points;
    std::string source;  // free-text provenance tag, e.g. "centroid"

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Throws BoundsError / FormatError when stream invariants do not hold
/// (event inside sensor bounds, non-strictly sorted timestamps).
void validate(const EventStream& stream);

/// Throws FormatError on index gaps or timestamps off the 100 Hz grid,
/// BoundsError when a non-blink label falls outside [0,w) x [0,h).
void validate(const LabelTrack& track, std::uint16_t sensor_width, std::uint16_t sensor_height);

/// Events with t0 <= t_us < t1, order preserved. Throws ArgumentError if t0 > t1.
EventStream slice(const EventStream& stream, std::uint64_t t0, std::uint64_t t1);

}  // namespace evio
