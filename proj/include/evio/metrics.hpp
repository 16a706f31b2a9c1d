#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "evio/events.hpp"

namespace evio {

/// Evaluation score card for one recording.
struct EvalReport {
    double pixel_error = 0.0;          // mean Euclidean distance over scored frames
    std::map<int, double> p_acc;       // threshold -> fraction within, for p in {5, 10, 15}
    std::vector<double> per_frame;     // distance per label, scored or not
    std::size_t n_scored = 0;
    bool blink_excluded = true;
};

inline constexpr int kAccuracyThresholds[] = {5, 10, 15};

/// Per-frame Euclidean distances with p-accuracy at the standard
/// thresholds; "within p" is inclusive (d <= p). Blink-flagged labels are
/// skipped when exclude_blink is set. Length mismatch or an empty scored
/// set raises ArgumentError.
EvalReport pixel_error(const Trajectory& pred, const LabelTrack& gt, bool exclude_blink = true);

struct NamedReport {
    std::string name;
    EvalReport report;
};

struct CompareRow {
    std::string name;
    double pixel_error = 0.0;
    double p5 = 0.0;
    double p10 = 0.0;
    double p15 = 0.0;
    std::size_t n_scored = 0;
};

/// Rows sorted by pixel_error ascending; equal errors keep input order.
std::vector<CompareRow> compare(std::span<const NamedReport> reports);

}  // namespace evio
