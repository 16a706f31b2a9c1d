#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evio/events.hpp"

namespace evio {

/// Synthetic-scene and DVS-model parameters.
///
/// The scene is a bright background (log-intensity 0) with a dark pupil disk
/// (log-intensity -contrast). A per-pixel accumulator integrates the
/// log-intensity change at each frame_dt_us step and emits one event per
/// full threshold crossing; the residual resets at polarity reversals.
struct SimConfig {
    std::uint16_t width = 80;
    std::uint16_t height = 60;
    double pupil_radius = 6.0;
    double contrast = 0.6;        // log-intensity depth of the disk, > 0
    double threshold = 0.3;       // log-intensity change per event, > 0
    double noise_rate_hz = 0.0;   // mean spurious events per pixel per second
    std::uint32_t frame_dt_us = 1000;  // must divide 10'000
    std::uint64_t seed = 42;
};

enum class SegmentKind { Fixation, Pursuit, Saccade, Blink };

/// One motion segment. Fields are used per kind:
///   Fixation  target (optional; holds current position when absent),
///             jitter_px (Gaussian sigma per label, default 0.3)
///   Pursuit   amplitude_px / frequency_hz, x(t) = x0 + A*sin(2*pi*f*t)
///   Saccade   target; minimum-jerk profile over the segment duration, or
///             over the duration implied by peak_velocity_px_s when set
///   Blink     none; position holds at the pre-blink value, blink = true
struct Segment {
    SegmentKind kind = SegmentKind::Fixation;
    std::uint64_t duration_us = 0;
    std::optional<Vec2> target;
    double amplitude_px = 0.0;
    double frequency_hz = 0.0;
    double jitter_px = 0.3;
    double peak_velocity_px_s = 0.0;  // 0 = derive speed from duration
};

/// Segment list plus the geometry targets are validated against. `margin`
/// keeps the pupil disk inside the sensor (usually the pupil radius).
struct MotionScript {
    std::uint16_t width = 80;
    std::uint16_t height = 60;
    double margin = 6.0;
    std::vector<Segment> segments;
};

/// Normalized minimum-jerk s-curve 10t^3 - 15t^4 + 6t^5 on [0, 1] (clamped
/// outside). Its peak slope is 1.875, i.e. peak velocity = 1.875 x mean.
double min_jerk_position(double tau);

/// Samples the script on the 100 Hz label grid. The initial position is the
/// sensor center until a fixation or saccade target moves it. Label
/// coordinates are snapped to a 1/1024 px grid so coordinate transforms
/// (e.g. flips) stay exact in floating point. Targets outside the margin
/// bounds raise ArgumentError.
LabelTrack synth_trajectory(const MotionScript& script, std::uint64_t seed);

/// Renders a DVS event stream for the track. The pupil position is
/// interpolated linearly between labels; during blink labels the disk is
/// occluded, producing a positive burst at onset and a negative burst at
/// offset. Poisson background noise is added per pixel at
/// cfg.noise_rate_hz. Deterministic for a fixed (track, cfg).
EventStream render_events(const LabelTrack& track, const SimConfig& cfg);

}  // namespace evio
