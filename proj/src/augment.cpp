#include "evio/augment.hpp"

#include <cmath>
#include <string>

namespace evio {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// uniform in [0, 1), keyed by (seed, counter)
double keyed_uniform(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(counter + 1));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

ShiftResult temporal_shift(const EventStream& stream, const LabelTrack& track,
                           std::int64_t shift_us) {
    if (shift_us > kMaxShiftUs || shift_us < -kMaxShiftUs) {
        throw ArgumentError("temporal_shift: |shift_us| must be <= 200000");
    }

    ShiftResult result;
    result.stream.sensor_width = stream.sensor_width;
    result.stream.sensor_height = stream.sensor_height;

    for (const Event& e : stream.events) {
        std::int64_t t = static_cast<std::int64_t>(e.t_us) + shift_us;
        if (t < 0) continue;
        Event shifted = e;
        shifted.t_us = static_cast<std::uint64_t>(t);
        result.stream.events.push_back(shifted);
    }

    const std::int64_t k = shift_us / static_cast<std::int64_t>(kLabelPeriodUs);  // toward zero
    for (const Label& l : track.labels) {
        std::int64_t j = static_cast<std::int64_t>(l.index) + k;
        if (j < 0) continue;
        // after a left shift the label landing at index 0 has no bin window
        // left of t = 0; its events were dropped with the negative timestamps
        if (j == 0 && k < 0) continue;
        Label moved = l;
        moved.index = static_cast<std::uint32_t>(j);
        moved.t_us = static_cast<std::uint64_t>(j) * kLabelPeriodUs;
        result.track.labels.push_back(moved);
    }

    result.empty_warning = result.stream.events.empty() || result.track.labels.empty();
    return result;
}

std::pair<EventStream, LabelTrack> spatial_flip(const EventStream& stream,
                                                const LabelTrack& track, bool flip_h,
                                                bool flip_v) {
    EventStream out_stream = stream;
    if (flip_h || flip_v) {
        for (Event& e : out_stream.events) {
            if (flip_h) e.x = static_cast<std::uint16_t>(stream.sensor_width - 1 - e.x);
            if (flip_v) e.y = static_cast<std::uint16_t>(stream.sensor_height - 1 - e.y);
        }
    }
    LabelTrack out_track = track;
    if (flip_h || flip_v) {
        for (Label& l : out_track.labels) {
            if (flip_h) l.x = (stream.sensor_width - 1) - l.x;
            if (flip_v) l.y = (stream.sensor_height - 1) - l.y;
        }
    }
    return {std::move(out_stream), std::move(out_track)};
}

EventStream event_deletion(const EventStream& stream, double frac, std::uint64_t seed) {
    if (frac < 0.0 || frac > 1.0) throw ArgumentError("event_deletion: frac must lie in [0, 1]");

    EventStream out;
    out.sensor_width = stream.sensor_width;
    out.sensor_height = stream.sensor_height;
    if (frac == 0.0) {
        out.events = stream.events;
        return out;
    }
    out.events.reserve(stream.events.size());
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (keyed_uniform(seed, i) >= frac) out.events.push_back(stream.events[i]);
    }
    return out;
}

ShiftResult augment(const EventStream& stream, const LabelTrack& track, const AugSpec& spec) {
    ShiftResult shifted = temporal_shift(stream, track, spec.shift_us);
    auto [flipped_stream, flipped_track] =
        spatial_flip(shifted.stream, shifted.track, spec.flip_h, spec.flip_v);
    ShiftResult result;
    result.stream = event_deletion(flipped_stream, spec.delete_frac, spec.seed);
    result.track = std::move(flipped_track);
    result.empty_warning =
        shifted.empty_warning || result.stream.events.empty() || result.track.labels.empty();
    return result;
}

}  // namespace evio
