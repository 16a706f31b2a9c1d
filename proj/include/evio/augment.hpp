#pragma once

#include <cstdint>
#include <utility>

#include "evio/events.hpp"

namespace evio {

constexpr std::int64_t kMaxShiftUs = 200'000;  // +/- 200 ms

/// Event-level augmentation recipe. Applied as shift -> flips -> deletion.
struct AugSpec {
    std::int64_t shift_us = 0;  // within [-200'000, 200'000]
    bool flip_h = false;
    bool flip_v = false;
    double delete_frac = 0.05;  // in [0, 1]
    std::uint64_t seed = 42;
};

struct ShiftResult {
    EventStream stream;
    LabelTrack track;
    bool empty_warning = false;  // the shift left no events or no labels
};

/// Shifts every event timestamp by shift_us (events that would become
/// negative are dropped) and realigns labels by k = shift_us / 10'000
/// rounded toward zero; the sub-10 ms remainder moves only the events.
/// Labels whose realigned index would be negative are trimmed, as is the
/// label landing at index 0 after a left shift (its bin-window events were
/// dropped with the negative timestamps), so the output covers only indices
/// where both events and labels exist.
ShiftResult temporal_shift(const EventStream& stream, const LabelTrack& track,
                           std::int64_t shift_us);

/// Mirrors event and label coordinates: x -> width-1-x and/or y -> height-1-y.
/// Blink flags are untouched. An involution on both stream and track.
std::pair<EventStream, LabelTrack> spatial_flip(const EventStream& stream,
                                                const LabelTrack& track, bool flip_h, bool flip_v);

/// Drops each event independently with probability frac. The draw for event
/// i depends only on (seed, i), so the result is stable under any
/// parallel evaluation order.
EventStream event_deletion(const EventStream& stream, double frac, std::uint64_t seed);

/// The full pipeline in AugSpec order.
ShiftResult augment(const EventStream& stream, const LabelTrack& track, const AugSpec& spec);

}  // namespace evio
