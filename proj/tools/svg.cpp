#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "evio/error.hpp"

namespace evio::cli {

namespace {

constexpr double kPanelWidth = 760.0;
constexpr double kSpatialHeight = 420.0;
constexpr double kSeriesHeight = 170.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 40.0;
constexpr double kGap = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct SvgOut {
    std::string body;

    void line(double x1, double y1, double x2, double y2, const char* color) {
        body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                "\" y2=\"" + num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
    }
    void rect(double x, double y, double w, double h) {
        body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                "\" height=\"" + num(h) + "\" fill=\"none\" stroke=\"#888888\"/>\n";
    }
    void text(double x, double y, const std::string& s, const char* color = "#222222") {
        body += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
                "\" font-family=\"monospace\" font-size=\"13\" fill=\"" + color + "\">" + s +
                "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
        if (pts.empty()) return;
        body += "<polyline fill=\"none\" stroke=\"";
        body += color;
        body += "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) body += num(x) + "," + num(y) + " ";
        body += "\"/>\n";
    }
};

}  // namespace

void write_trajectory_svg(const Trajectory& pred, const LabelTrack& gt,
                          std::uint16_t sensor_width, std::uint16_t sensor_height,
                          const std::filesystem::path& path) {
    const std::size_t n = gt.labels.size();
    if (pred.points.size() != n || n == 0) {
        throw ArgumentError("trajectory report: prediction and label counts differ");
    }

    const char* kGtColor = "#1f77b4";
    const char* kPredColor = "#d62728";

    SvgOut svg;
    double total_height = kMarginTop + kSpatialHeight + (kGap + kSeriesHeight) * 2 + 60.0;
    double plot_w = kPanelWidth - kMarginLeft - 20.0;

    // panel 1: sensor-space overlay, aspect preserved
    double scale = std::min(plot_w / sensor_width, kSpatialHeight / sensor_height);
    double ox = kMarginLeft, oy = kMarginTop;
    svg.rect(ox, oy, sensor_width * scale, sensor_height * scale);
    svg.text(ox, oy - 10.0, "pupil center, sensor space (" + std::to_string(sensor_width) + "x" +
                                std::to_string(sensor_height) + ")");
    svg.text(ox + 200.0, oy - 10.0, "ground truth", kGtColor);
    svg.text(ox + 320.0, oy - 10.0, "prediction", kPredColor);

    std::vector<std::pair<double, double>> gt_pts, pred_pts;
    for (std::size_t i = 0; i < n; ++i) {
        gt_pts.push_back({ox + gt.labels[i].x * scale, oy + gt.labels[i].y * scale});
        pred_pts.push_back({ox + pred.points[i].x * scale, oy + pred.points[i].y * scale});
    }
    svg.polyline(gt_pts, kGtColor);
    svg.polyline(pred_pts, kPredColor);

    // panels 2 and 3: x(t) and y(t)
    const double t0 = static_cast<double>(gt.labels.front().t_us) * 1e-6;
    const double t1 = static_cast<double>(gt.labels.back().t_us) * 1e-6;
    const double t_span = std::max(t1 - t0, 1e-9);
    struct Axis {
        const char* label;
        double limit;
    };
    Axis axes[2] = {{"x (px) vs time (s)", static_cast<double>(sensor_width)},
                    {"y (px) vs time (s)", static_cast<double>(sensor_height)}};
    for (int a = 0; a < 2; ++a) {
        double top = kMarginTop + kSpatialHeight + kGap + a * (kSeriesHeight + kGap);
        svg.rect(ox, top, plot_w, kSeriesHeight);
        svg.text(ox, top - 8.0, axes[a].label);
        svg.text(ox - 45.0, top + 12.0, num(axes[a].limit));
        svg.text(ox - 45.0, top + kSeriesHeight, "0");
        svg.text(ox, top + kSeriesHeight + 16.0, num(t0));
        svg.text(ox + plot_w - 40.0, top + kSeriesHeight + 16.0, num(t1));

        auto sy = [&](double v) {
            return top + kSeriesHeight - std::clamp(v / axes[a].limit, 0.0, 1.0) * kSeriesHeight;
        };
        std::vector<std::pair<double, double>> gt_line, pred_line;
        for (std::size_t i = 0; i < n; ++i) {
            double sx = ox + (static_cast<double>(gt.labels[i].t_us) * 1e-6 - t0) / t_span * plot_w;
            gt_line.push_back({sx, sy(a == 0 ? gt.labels[i].x : gt.labels[i].y)});
            pred_line.push_back({sx, sy(a == 0 ? pred.points[i].x : pred.points[i].y)});
        }
        svg.polyline(gt_line, kGtColor);
        svg.polyline(pred_line, kPredColor);
    }

    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelWidth << "\" height=\""
        << total_height << "\" viewBox=\"0 0 " << kPanelWidth << " " << total_height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << svg.body << "</svg>\n";
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace evio::cli
