#include "evio/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace evio {

namespace {

constexpr double kMinJerkPeakRatio = 1.875;  // peak / mean velocity of the profile
constexpr double kCoordGrid = 1024.0;        // labels snap to 1/1024 px

// Snapping label coordinates to a dyadic grid keeps integer-anchored
// transforms (spatial flips) exactly invertible in floating point.
double quantize(double v) { return std::nearbyint(v * kCoordGrid) / kCoordGrid; }

double clamp_coord(double v, double hi) { return std::clamp(v, 0.0, hi); }

struct BoundsBox {
    double lo_x, hi_x, lo_y, hi_y;

    bool contains(Vec2 p) const {
        return p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y;
    }
};

void check_target(const BoundsBox& box, Vec2 p, const char* what) {
    if (!box.contains(p)) {
        throw ArgumentError(std::string(what) + " target (" + std::to_string(p.x) + "," +
                            std::to_string(p.y) + ") outside the margin bounds");
    }
}

struct SceneState {
    Vec2 center;
    bool blink;
};

// Linear interpolation between labels; blink state follows the label whose
// 10 ms interval contains t.
SceneState scene_at(const LabelTrack& track, std::uint64_t t) {
    std::uint64_t t0 = track.labels.front().t_us;
    std::size_t i = static_cast<std::size_t>((t - t0) / kLabelPeriodUs);
    if (i >= track.labels.size() - 1) {
        const Label& last = track.labels.back();
        return {{last.x, last.y}, last.blink};
    }
    const Label& a = track.labels[i];
    const Label& b = track.labels[i + 1];
    double alpha = static_cast<double>(t - a.t_us) / static_cast<double>(kLabelPeriodUs);
    return {{a.x + (b.x - a.x) * alpha, a.y + (b.y - a.y) * alpha}, a.blink};
}

}  // namespace

double min_jerk_position(double tau) {
    tau = std::clamp(tau, 0.0, 1.0);
    double t3 = tau * tau * tau;
    return t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
}

LabelTrack synth_trajectory(const MotionScript& script, std::uint64_t seed) {
    if (script.segments.empty()) throw ArgumentError("synth_trajectory: empty script");
    if (script.width == 0 || script.height == 0) {
        throw ArgumentError("synth_trajectory: zero sensor dimension");
    }
    BoundsBox box{script.margin, script.width - 1.0 - script.margin, script.margin,
                  script.height - 1.0 - script.margin};
    if (box.lo_x > box.hi_x || box.lo_y > box.hi_y) {
        throw ArgumentError("synth_trajectory: margin leaves no room on the sensor");
    }

    std::uint64_t total_us = 0;
    for (const Segment& seg : script.segments) {
        if (seg.duration_us == 0) throw ArgumentError("synth_trajectory: zero-length segment");
        total_us += seg.duration_us;
    }
    std::size_t n_labels = static_cast<std::size_t>((total_us + kLabelPeriodUs - 1) / kLabelPeriodUs);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    LabelTrack track;
    track.labels.reserve(n_labels);

    Vec2 pos{(script.width - 1) / 2.0, (script.height - 1) / 2.0};
    std::uint64_t seg_start = 0;
    std::size_t k = 0;  // next label index

    for (const Segment& seg : script.segments) {
        std::uint64_t seg_end = seg_start + seg.duration_us;

        Vec2 anchor = pos;
        Vec2 target = seg.target.value_or(pos);
        double profile_us = static_cast<double>(seg.duration_us);

        switch (seg.kind) {
            case SegmentKind::Fixation:
                if (seg.target) check_target(box, *seg.target, "fixation");
                anchor = target;
                break;
            case SegmentKind::Saccade: {
                if (!seg.target) throw ArgumentError("saccade segment needs a target");
                check_target(box, *seg.target, "saccade");
                double dist = norm(target - anchor);
                if (seg.peak_velocity_px_s > 0.0 && dist > 0.0) {
                    double d = kMinJerkPeakRatio * dist / seg.peak_velocity_px_s * 1e6;
                    profile_us = std::clamp(d, 1.0, static_cast<double>(seg.duration_us));
                }
                break;
            }
            case SegmentKind::Pursuit: {
                if (seg.amplitude_px < 0.0) throw ArgumentError("pursuit amplitude < 0");
                Vec2 lo{anchor.x - seg.amplitude_px, anchor.y};
                Vec2 hi{anchor.x + seg.amplitude_px, anchor.y};
                check_target(box, lo, "pursuit swing");
                check_target(box, hi, "pursuit swing");
                break;
            }
            case SegmentKind::Blink:
                break;
        }

        for (; k * kLabelPeriodUs < seg_end && k < n_labels; ++k) {
            std::uint64_t t = k * kLabelPeriodUs;
            double rel_us = static_cast<double>(t - seg_start);

            Vec2 p = anchor;
            bool blink = false;
            switch (seg.kind) {
                case SegmentKind::Fixation:
                    if (seg.jitter_px > 0.0) {
                        p.x += gauss(rng) * seg.jitter_px;
                        p.y += gauss(rng) * seg.jitter_px;
                    }
                    break;
                case SegmentKind::Pursuit:
                    p.x = anchor.x +
                          seg.amplitude_px * std::sin(2.0 * M_PI * seg.frequency_hz * rel_us * 1e-6);
                    break;
                case SegmentKind::Saccade:
                    p = anchor + (target - anchor) * min_jerk_position(rel_us / profile_us);
                    break;
                case SegmentKind::Blink:
                    blink = true;
                    break;
            }

            Label label;
            label.index = static_cast<std::uint32_t>(k);
            label.t_us = t;
            label.x = clamp_coord(quantize(p.x), script.width - 1.0);
            label.y = clamp_coord(quantize(p.y), script.height - 1.0);
            label.blink = blink;
            track.labels.push_back(label);
        }

        // advance the carried position to the segment end
        switch (seg.kind) {
            case SegmentKind::Fixation:
                pos = anchor;
                break;
            case SegmentKind::Pursuit:
                pos.x = anchor.x + seg.amplitude_px *
                                       std::sin(2.0 * M_PI * seg.frequency_hz *
                                                static_cast<double>(seg.duration_us) * 1e-6);
                break;
            case SegmentKind::Saccade:
                pos = target;
                break;
            case SegmentKind::Blink:
                break;
        }
        seg_start = seg_end;
    }
    return track;
}

EventStream render_events(const LabelTrack& track, const SimConfig& cfg) {
    if (cfg.threshold <= 0.0) throw ArgumentError("render_events: threshold must be > 0");
    if (cfg.contrast <= 0.0) throw ArgumentError("render_events: contrast must be > 0");
    if (cfg.frame_dt_us == 0 || cfg.frame_dt_us > kLabelPeriodUs ||
        kLabelPeriodUs % cfg.frame_dt_us != 0) {
        throw ArgumentError("render_events: frame_dt_us must divide 10000");
    }
    if (track.labels.empty()) throw ArgumentError("render_events: empty track");

    EventStream stream;
    stream.sensor_width = cfg.width;
    stream.sensor_height = cfg.height;
    if (track.labels.size() < 2) return stream;

    const double r2 = cfg.pupil_radius * cfg.pupil_radius;
    std::vector<double> residual(static_cast<std::size_t>(cfg.width) * cfg.height, 0.0);

    std::mt19937_64 rng(cfg.seed);
    const double noise_lambda =
        cfg.noise_rate_hz * cfg.width * cfg.height * cfg.frame_dt_us * 1e-6;
    std::poisson_distribution<int> noise_count(noise_lambda > 0.0 ? noise_lambda : 1.0);
    std::uniform_int_distribution<int> rand_x(0, cfg.width - 1);
    std::uniform_int_distribution<int> rand_y(0, cfg.height - 1);
    std::uniform_int_distribution<int> rand_pol(0, 1);

    auto log_intensity = [&](const SceneState& s, int x, int y) {
        if (s.blink) return 0.0;
        double dx = x - s.center.x;
        double dy = y - s.center.y;
        return dx * dx + dy * dy <= r2 ? -cfg.contrast : 0.0;
    };

    std::uint64_t t0 = track.labels.front().t_us;
    std::uint64_t t_end = track.labels.back().t_us;
    SceneState prev = scene_at(track, t0);
    std::vector<Event> step_events;

    for (std::uint64_t t = t0 + cfg.frame_dt_us; t <= t_end; t += cfg.frame_dt_us) {
        SceneState cur = scene_at(track, t);
        step_events.clear();

        // only pixels near either disk position can change
        double margin = cfg.pupil_radius + 1.0;
        int x_lo = static_cast<int>(std::floor(std::min(prev.center.x, cur.center.x) - margin));
        int x_hi = static_cast<int>(std::ceil(std::max(prev.center.x, cur.center.x) + margin));
        int y_lo = static_cast<int>(std::floor(std::min(prev.center.y, cur.center.y) - margin));
        int y_hi = static_cast<int>(std::ceil(std::max(prev.center.y, cur.center.y) + margin));
        x_lo = std::max(x_lo, 0);
        y_lo = std::max(y_lo, 0);
        x_hi = std::min(x_hi, cfg.width - 1);
        y_hi = std::min(y_hi, cfg.height - 1);

        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                double delta = log_intensity(cur, x, y) - log_intensity(prev, x, y);
                if (delta == 0.0) continue;
                std::size_t i = static_cast<std::size_t>(y) * cfg.width + x;
                double res = residual[i];
                if (res != 0.0 && std::signbit(res) != std::signbit(delta)) res = 0.0;
                res += delta;
                int n = static_cast<int>(std::abs(res) / cfg.threshold);
                if (n > 0) {
                    Polarity pol = res > 0.0 ? Polarity::Positive : Polarity::Negative;
                    for (int j = 0; j < n; ++j) {
                        step_events.push_back({t, static_cast<std::uint16_t>(x),
                                               static_cast<std::uint16_t>(y), pol});
                    }
                    res -= n * cfg.threshold * (res > 0.0 ? 1.0 : -1.0);
                }
                residual[i] = res;
            }
        }

        if (noise_lambda > 0.0) {
            int n = noise_count(rng);
            for (int j = 0; j < n; ++j) {
                step_events.push_back({t, static_cast<std::uint16_t>(rand_x(rng)),
                                       static_cast<std::uint16_t>(rand_y(rng)),
                                       rand_pol(rng) ? Polarity::Positive : Polarity::Negative});
            }
        }
        // events share the step timestamp; readout order inside a tick is
        // arbitrary on a real sensor, so avoid a deterministic scan artifact
        std::shuffle(step_events.begin(), step_events.end(), rng);
        stream.events.insert(stream.events.end(), step_events.begin(), step_events.end());
        prev = cur;
    }
    return stream;
}

}  // namespace evio
