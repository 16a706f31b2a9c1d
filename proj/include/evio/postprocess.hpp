#pragma once

#include <cstdint>
#include <vector>

#include "evio/events.hpp"
#include "evio/representation.hpp"

namespace evio {

/// Motion statistic driving the adaptive median window.
enum class VarianceMethod { Displacement, Velocity, Acceleration, Covariance, Frequency };

/// Motion-aware median filter parameters. Window bounds must be odd.
struct M2FParams {
    std::size_t w_base = 15;  // window for variance estimation and smoothing
    std::size_t w_min = 3;    // smallest allowed median window (odd)
    std::size_t w_max = 21;   // largest allowed median window (odd)
    double percentile = 75.0; // rolling percentile for the adaptive window
    VarianceMethod method = VarianceMethod::Velocity;
};

/// Optical-flow refinement parameters.
struct OFEParams {
    double tau = 1.0;    // scaling parameter: ROI half-size and count gate are tau*10
    std::size_t c = 5;   // count threshold: history length for the ROI update
    double gamma = 3.0;  // difference threshold (scaled by tau)
    double kappa = 0.5;  // ROI expand/shrink fraction, in (0,1)
};

/// Local motion variance over a centered, edge-truncated rolling window of
/// w_base samples (w_base >= 3):
///   Displacement  var(x) + var(y) of the window positions
///   Velocity      var of first-difference magnitudes
///   Acceleration  var of second-difference magnitudes
///   Covariance    |cov(x, y)|
///   Frequency     mean squared deviation of the first-difference vectors
///                 from their window mean (high-frequency energy)
/// Trajectories shorter than 3 samples yield all zeros.
std::vector<double> motion_variance(const Trajectory& traj, VarianceMethod method,
                                    std::size_t w_base);

/// The per-sample median window sizes the filter will use: variance ->
/// rolling mean -> clip -> rolling percentile -> clip -> nearest odd.
std::vector<std::size_t> m2f_adaptive_windows(const Trajectory& traj, const M2FParams& params);

/// Motion-aware median filtering: each output sample is the median of the
/// adaptive[t]-sized centered window (edge-truncated) per coordinate.
Trajectory m2f(const Trajectory& traj, const M2FParams& params);

/// Optical-flow refinement: tiles the stream span into one window per
/// prediction, gathers the events inside the square ROI around each
/// prediction, and when enough are present shifts the prediction one pixel
/// toward the cumulative event displacement (last minus first position).
Trajectory ofe(const Trajectory& traj, const EventStream& stream, const OFEParams& params);

struct BlinkOverrideResult {
    Trajectory trajectory;
    std::vector<std::uint8_t> flagged;  // 1 per frame where the rule fired
    bool all_flagged = false;           // every frame flagged: input passed through
};

/// Polarity-ratio blink rule: frame i is flagged when pos/neg falls below
/// ratio_threshold (0.09 by default); frames with zero events on both
/// channels are flagged, frames with only positive events are not. Flagged
/// predictions are replaced by the nearest unflagged prediction (earlier
/// index wins ties).
BlinkOverrideResult blink_override(const Trajectory& traj, const FrameStack& stack,
                                   double ratio_threshold = 0.09);

}  // namespace evio
