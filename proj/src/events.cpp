#include "evio/events.hpp"

#include <algorithm>
#include <string>

namespace evio {

void validate(const EventStream& stream) {
    std::uint64_t prev_t = 0;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const Event& e = stream.events[i];
        if (e.x >= stream.sensor_width || e.y >= stream.sensor_height) {
            throw BoundsError("event " + std::to_string(i) + " at (" + std::to_string(e.x) +
                              "," + std::to_string(e.y) + ") outside sensor " +
                              std::to_string(stream.sensor_width) + "x" +
                              std::to_string(stream.sensor_height));
        }
        if (i > 0 && e.t_us < prev_t) {
            throw FormatError("event " + std::to_string(i) + " breaks timestamp order");
        }
        prev_t = e.t_us;
    }
}

void validate(const LabelTrack& track, std::uint16_t sensor_width, std::uint16_t sensor_height) {
    for (std::size_t i = 0; i < track.labels.size(); ++i) {
        const Label& l = track.labels[i];
        if (i > 0 && l.index != track.labels[i - 1].index + 1) {
            throw FormatError("label index gap at position " + std::to_string(i));
        }
        if (l.t_us != static_cast<std::uint64_t>(l.index) * kLabelPeriodUs) {
            throw FormatError("label " + std::to_string(l.index) + " off the 100 Hz grid");
        }
        if (!l.blink && (l.x < 0.0 || l.x >= sensor_width || l.y < 0.0 || l.y >= sensor_height)) {
            throw BoundsError("label " + std::to_string(l.index) + " outside sensor bounds");
        }
    }
}

EventStream slice(const EventStream& stream, std::uint64_t t0, std::uint64_t t1) {
    if (t0 > t1) throw ArgumentError("slice: t0 > t1");
    auto by_time = [](const Event& e, std::uint64_t t) { return e.t_us < t; };
    auto first = std::lower_bound(stream.events.begin(), stream.events.end(), t0, by_time);
    auto last = std::lower_bound(first, stream.events.end(), t1, by_time);
    EventStream out;
    out.sensor_width = stream.sensor_width;
    out.sensor_height = stream.sensor_height;
    out.events.assign(first, last);
    return out;
}

}  // namespace evio
