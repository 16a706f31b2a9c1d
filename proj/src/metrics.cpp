#include "evio/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace evio {

EvalReport pixel_error(const Trajectory& pred, const LabelTrack& gt, bool exclude_blink) {
    if (pred.points.size() != gt.labels.size()) {
        throw ArgumentError("pixel_error: prediction and label counts differ");
    }
    if (pred.points.empty()) throw ArgumentError("pixel_error: nothing to score");

    EvalReport report;
    report.blink_excluded = exclude_blink;
    report.per_frame.reserve(pred.points.size());

    double sum = 0.0;
    std::vector<double> scored;
    scored.reserve(pred.points.size());
    for (std::size_t i = 0; i < pred.points.size(); ++i) {
        double dx = pred.points[i].x - gt.labels[i].x;
        double dy = pred.points[i].y - gt.labels[i].y;
        double d = std::sqrt(dx * dx + dy * dy);
        report.per_frame.push_back(d);
        if (exclude_blink && gt.labels[i].blink) continue;
        scored.push_back(d);
        sum += d;
    }
    if (scored.empty()) throw ArgumentError("pixel_error: zero scored frames");

    report.n_scored = scored.size();
    report.pixel_error = sum / static_cast<double>(scored.size());
    for (int p : kAccuracyThresholds) {
        std::size_t within = 0;
        for (double d : scored) {
            if (d <= p) ++within;
        }
        report.p_acc[p] = static_cast<double>(within) / static_cast<double>(scored.size());
    }
    return report;
}

std::vector<CompareRow> compare(std::span<const NamedReport> reports) {
    if (reports.empty()) throw ArgumentError("compare: need at least one report");
    std::vector<CompareRow> rows;
    rows.reserve(reports.size());
    for (const NamedReport& nr : reports) {
        CompareRow row;
        row.name = nr.name;
        row.pixel_error = nr.report.pixel_error;
        row.p5 = nr.report.p_acc.count(5) ? nr.report.p_acc.at(5) : 0.0;
        row.p10 = nr.report.p_acc.count(10) ? nr.report.p_acc.at(10) : 0.0;
        row.p15 = nr.report.p_acc.count(15) ? nr.report.p_acc.at(15) : 0.0;
        row.n_scored = nr.report.n_scored;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
        return a.pixel_error < b.pixel_error;
    });
    return rows;
}

}  // namespace evio
