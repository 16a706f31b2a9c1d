#include "evio/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace evio {

namespace {

// Centered window [t - (w-1)/2, t + w/2] truncated to [0, n).
struct WindowBounds {
    std::size_t lo, hi;  // inclusive
};

WindowBounds window_at(std::size_t t, std::size_t w, std::size_t n) {
    std::size_t half_lo = (w - 1) / 2;
    std::size_t lo = t >= half_lo ? t - half_lo : 0;
    std::size_t hi = std::min(t + w / 2, n - 1);
    return {lo, hi};
}

double population_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

std::vector<double> rolling_mean(const std::vector<double>& v, std::size_t w) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t t = 0; t < v.size(); ++t) {
        auto [lo, hi] = window_at(t, w, v.size());
        double sum = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) sum += v[i];
        out[t] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Percentile with linear interpolation between closest ranks.
double percentile_of(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= v.size()) return v.back();
    double frac = rank - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::vector<double> rolling_percentile(const std::vector<double>& v, std::size_t w, double p) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t t = 0; t < v.size(); ++t) {
        auto [lo, hi] = window_at(t, w, v.size());
        out[t] = percentile_of(std::vector<double>(v.begin() + lo, v.begin() + hi + 1), p);
    }
    return out;
}

std::size_t nearest_odd(double v) {
    // nearest odd integer >= 1, ties rounding up
    double k = std::floor((v - 1.0) / 2.0 + 0.5);
    long odd = 2L * static_cast<long>(k) + 1L;
    return odd < 1 ? 1u : static_cast<std::size_t>(odd);
}

double median_of(std::vector<double>& v) {
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        double lower = *std::max_element(v.begin(), v.begin() + mid);
        m = (lower + m) / 2.0;
    }
    return m;
}

void check_params(const M2FParams& p) {
    if (p.w_base < 3) throw ArgumentError("m2f: w_base must be >= 3");
    if (p.w_min < 1 || p.w_min % 2 == 0 || p.w_max % 2 == 0 || p.w_min > p.w_max) {
        throw ArgumentError("m2f: w_min/w_max must be odd with w_min <= w_max");
    }
    if (p.percentile < 0.0 || p.percentile > 100.0) {
        throw ArgumentError("m2f: percentile must lie in [0, 100]");
    }
}

}  // namespace

std::vector<double> motion_variance(const Trajectory& traj, VarianceMethod method,
                                    std::size_t w_base) {
    if (w_base < 3) throw ArgumentError("motion_variance: w_base must be >= 3");
    const std::size_t n = traj.points.size();
    std::vector<double> out(n, 0.0);
    if (n < 3) return out;  // too short for motion statistics: passthrough zeros

    const auto& pts = traj.points;
    for (std::size_t t = 0; t < n; ++t) {
        auto [lo, hi] = window_at(t, w_base, n);
        std::size_t len = hi - lo + 1;
        switch (method) {
            case VarianceMethod::Displacement: {
                std::vector<double> xs(len), ys(len);
                for (std::size_t i = 0; i < len; ++i) {
                    xs[i] = pts[lo + i].x;
                    ys[i] = pts[lo + i].y;
                }
                out[t] = population_variance(xs) + population_variance(ys);
                break;
            }
            case VarianceMethod::Velocity: {
                if (len < 2) break;
                std::vector<double> d(len - 1);
                for (std::size_t i = 0; i + 1 < len; ++i) d[i] = norm(pts[lo + i + 1] - pts[lo + i]);
                out[t] = population_variance(d);
                break;
            }
            case VarianceMethod::Acceleration: {
                if (len < 3) break;
                std::vector<double> d(len - 2);
                for (std::size_t i = 0; i + 2 < len; ++i) {
                    Vec2 a = pts[lo + i + 2] - pts[lo + i + 1];
                    Vec2 b = pts[lo + i + 1] - pts[lo + i];
                    d[i] = norm(a - b);
                }
                out[t] = population_variance(d);
                break;
            }
            case VarianceMethod::Covariance: {
                if (len < 2) break;
                double mx = 0.0, my = 0.0;
                for (std::size_t i = lo; i <= hi; ++i) {
                    mx += pts[i].x;
                    my += pts[i].y;
                }
                mx /= static_cast<double>(len);
                my /= static_cast<double>(len);
                double acc = 0.0;
                for (std::size_t i = lo; i <= hi; ++i) acc += (pts[i].x - mx) * (pts[i].y - my);
                out[t] = std::abs(acc / static_cast<double>(len));
                break;
            }
            case VarianceMethod::Frequency: {
                if (len < 2) break;
                Vec2 mean{0.0, 0.0};
                std::vector<Vec2> d(len - 1);
                for (std::size_t i = 0; i + 1 < len; ++i) {
                    d[i] = pts[lo + i + 1] - pts[lo + i];
                    mean = mean + d[i];
                }
                mean = mean * (1.0 / static_cast<double>(d.size()));
                double acc = 0.0;
                for (const Vec2& v : d) {
                    Vec2 dev = v - mean;
                    acc += dev.x * dev.x + dev.y * dev.y;
                }
                out[t] = acc / static_cast<double>(d.size());
                break;
            }
        }
    }
    return out;
}

std::vector<std::size_t> m2f_adaptive_windows(const Trajectory& traj, const M2FParams& params) {
    check_params(params);
    std::vector<double> variance = motion_variance(traj, params.method, params.w_base);
    std::vector<double> smoothed = rolling_mean(variance, params.w_base);

    const double w_min = static_cast<double>(params.w_min);
    const double w_max = static_cast<double>(params.w_max);
    std::vector<double> median_window(smoothed.size());
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
        median_window[i] = std::clamp(smoothed[i], w_min, w_max);
    }

    std::vector<double> adaptive =
        rolling_percentile(median_window, params.w_base, params.percentile);
    std::vector<std::size_t> windows(adaptive.size());
    for (std::size_t i = 0; i < adaptive.size(); ++i) {
        windows[i] = nearest_odd(std::clamp(adaptive[i], w_min, w_max));
    }
    return windows;
}

Trajectory m2f(const Trajectory& traj, const M2FParams& params) {
    std::vector<std::size_t> windows = m2f_adaptive_windows(traj, params);

    Trajectory out;
    out.source = traj.source.empty() ? "m2f" : traj.source + "+m2f";
    out.points.resize(traj.points.size());
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < traj.points.size(); ++t) {
        auto [lo, hi] = window_at(t, windows[t], traj.points.size());
        xs.clear();
        ys.clear();
        for (std::size_t i = lo; i <= hi; ++i) {
            xs.push_back(traj.points[i].x);
            ys.push_back(traj.points[i].y);
        }
        out.points[t] = {median_of(xs), median_of(ys)};
    }
    return out;
}

Trajectory ofe(const Trajectory& traj, const EventStream& stream, const OFEParams& params) {
    if (params.tau <= 0.0) throw ArgumentError("ofe: tau must be > 0");
    if (params.gamma <= 0.0) throw ArgumentError("ofe: gamma must be > 0");
    if (params.c < 1) throw ArgumentError("ofe: c must be >= 1");
    if (params.kappa <= 0.0 || params.kappa >= 1.0) {
        throw ArgumentError("ofe: kappa must lie in (0, 1)");
    }
    if (traj.points.empty()) throw ArgumentError("ofe: empty trajectory");
    if (stream.time_span_us() == 0) throw ArgumentError("ofe: stream time span must be positive");

    const std::size_t n = traj.points.size();
    const double t_min = static_cast<double>(stream.events.front().t_us);
    const double t_max = static_cast<double>(stream.events.back().t_us);
    const double timestep = (t_max - t_min) / static_cast<double>(n);
    const double roi_base = params.tau * 10.0;
    const double count_gate = params.tau * 10.0;

    Trajectory out = traj;
    out.source = traj.source.empty() ? "ofe" : traj.source + "+ofe";

    auto by_time = [](const Event& e, std::uint64_t t) { return e.t_us < t; };
    double roi = roi_base;
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 p = traj.points[j];

        if (j > params.c) {
            double mean_x = 0.0, mean_y = 0.0;
            for (std::size_t i = j - params.c; i < j; ++i) {
                mean_x += traj.points[i].x;
                mean_y += traj.points[i].y;
            }
            mean_x /= static_cast<double>(params.c);
            mean_y /= static_cast<double>(params.c);
            bool moved = std::abs(p.x - mean_x) > params.tau * params.gamma ||
                         std::abs(p.y - mean_y) > params.tau * params.gamma;
            roi = (moved ? 1.0 + params.kappa : 1.0 - params.kappa) * roi_base;
        }

        double w_lo = t_min + static_cast<double>(j) * timestep;
        double w_hi = w_lo + timestep;
        auto first = std::lower_bound(stream.events.begin(), stream.events.end(),
                                      static_cast<std::uint64_t>(std::ceil(w_lo)), by_time);
        auto last = std::lower_bound(first, stream.events.end(),
                                     static_cast<std::uint64_t>(std::ceil(w_hi)), by_time);

        // first/last event inside the square ROI, in stream order; the inner
        // per-event displacement sum telescopes to last - first
        bool any = false;
        Vec2 first_pos{}, last_pos{};
        std::size_t count = 0;
        for (auto it = first; it != last; ++it) {
            if (std::abs(it->x - p.x) > roi || std::abs(it->y - p.y) > roi) continue;
            last_pos = {static_cast<double>(it->x), static_cast<double>(it->y)};
            if (!any) first_pos = last_pos;
            any = true;
            ++count;
        }
        if (static_cast<double>(count) > count_gate) {
            double dx = last_pos.x - first_pos.x;
            double dy = last_pos.y - first_pos.y;
            if (dx != 0.0 || dy != 0.0) {
                double len = std::hypot(dx, dy);
                out.points[j] = {p.x + dx / len, p.y + dy / len};
            }
        }
    }
    return out;
}

BlinkOverrideResult blink_override(const Trajectory& traj, const FrameStack& stack,
                                   double ratio_threshold) {
    if (traj.points.size() != stack.frames.size()) {
        throw ArgumentError("blink_override: trajectory and frame stack must be aligned");
    }

    const std::size_t n = traj.points.size();
    BlinkOverrideResult result;
    result.trajectory = traj;
    result.trajectory.source =
        traj.source.empty() ? "blink_override" : traj.source + "+blink_override";
    result.flagged.assign(n, 0);

    std::size_t n_flagged = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t pos = stack.frames[i].total_pos();
        std::uint64_t neg = stack.frames[i].total_neg();
        bool flag;
        if (neg == 0) {
            flag = pos == 0;  // silent frame; positive-only frames pass
        } else {
            flag = static_cast<double>(pos) / static_cast<double>(neg) < ratio_threshold;
        }
        result.flagged[i] = flag ? 1 : 0;
        if (flag) ++n_flagged;
    }

    if (n_flagged == n) {
        result.all_flagged = true;  // nothing to borrow from: passthrough
        return result;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!result.flagged[i]) continue;
        for (std::size_t d = 1; d < n; ++d) {
            if (i >= d && !result.flagged[i - d]) {
                result.trajectory.points[i] = traj.points[i - d];
                break;
            }
            if (i + d < n && !result.flagged[i + d]) {
                result.trajectory.points[i] = traj.points[i + d];
                break;
            }
        }
    }
    return result;
}

}  // namespace evio
