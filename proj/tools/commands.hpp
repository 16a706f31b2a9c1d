#pragma once

#include <cstdint>
#include <string>

namespace evio::cli {

struct SimulateOpts {
    std::string scenario;
    std::string out_dir;
    std::int64_t seed_override = -1;  // < 0: keep the scenario seed
};
int cmd_simulate(const SimulateOpts& opts);

struct ConvertOpts {
    std::string in_path;
    std::string out_path;
    std::uint16_t width = 640;
    std::uint16_t height = 480;
};
int cmd_convert(const ConvertOpts& opts);

struct AugmentOpts {
    std::string events;
    std::string labels;
    std::string out_dir;
    std::int64_t shift_us = 0;
    bool flip_h = false;
    bool flip_v = false;
    double delete_frac = 0.0;
    std::uint64_t seed = 42;
    std::uint16_t width = 640;
    std::uint16_t height = 480;
};
int cmd_augment(const AugmentOpts& opts);

struct TrackOpts {
    std::string events;
    std::string labels;
    std::string out_path;
    std::string tracker = "centroid";  // centroid | linear
    std::uint16_t width = 640;
    std::uint16_t height = 480;
    // centroid
    double decay = 2.0;
    double min_events = 1.0;
    // linear
    std::string model_in;
    std::string model_out;
    double lr = 0.1;
    std::size_t epochs = 200;
    std::uint16_t fx = 4;
    std::uint16_t fy = 4;
    std::uint64_t seed = 42;
};
int cmd_track(const TrackOpts& opts);

struct PostprocessOpts {
    std::string pred;
    std::string out_path;
    std::string events;
    std::string labels;
    bool run_m2f = false;
    bool run_ofe = false;
    bool run_blink = false;
    std::string method = "velocity";
    std::size_t w_base = 15;
    std::size_t w_min = 3;
    std::size_t w_max = 21;
    double percentile = 75.0;
    double tau = 1.0;
    std::size_t count_threshold = 5;
    double gamma = 3.0;
    double kappa = 0.5;
    double ratio_threshold = 0.09;
    std::uint16_t width = 640;
    std::uint16_t height = 480;
};
int cmd_postprocess(const PostprocessOpts& opts);

struct EvaluateOpts {
    std::string pred;    // file or directory
    std::string labels;  // file or directory
    bool include_blink = false;
    std::string report_path = "report.csv";
    std::string name;  // row name for single-file mode
};
int cmd_evaluate(const EvaluateOpts& opts);

struct ReportOpts {
    std::string pred;
    std::string labels;
    std::string out_dir;
    bool include_blink = false;
    std::string name;
};
int cmd_report(const ReportOpts& opts);

struct DumpOpts {
    std::string events;
    std::string labels;
    std::string out_dir;
    std::string mode = "sum";  // sum | pos | neg | binary | binarep
    int bits = 8;
    std::size_t start = 0;
    std::uint16_t fx = 1;
    std::uint16_t fy = 1;
    std::uint16_t width = 640;
    std::uint16_t height = 480;
};
int cmd_dump(const DumpOpts& opts);

}  // namespace evio::cli
