#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <vector>

#include "evio/augment.hpp"
#include "evio/io.hpp"
#include "evio/metrics.hpp"
#include "evio/postprocess.hpp"
#include "evio/representation.hpp"
#include "evio/scenario.hpp"
#include "evio/threading.hpp"
#include "evio/trackers.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace evio::cli {

namespace {

EventStream load_events(const std::string& path, std::uint16_t width, std::uint16_t height) {
    if (fs::path(path).extension() == ".bin") return read_events_bin(path);
    return read_events_csv(path, width, height);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

std::string fixed4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void write_report_csv(const std::vector<CompareRow>& rows, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "name,pixel_error,p5,p10,p15,n_scored\n";
    for (const CompareRow& r : rows) {
        out << r.name << ',' << fixed4(r.pixel_error) << ',' << fixed4(r.p5) << ','
            << fixed4(r.p10) << ',' << fixed4(r.p15) << ',' << r.n_scored << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

void print_table(const std::vector<CompareRow>& rows) {
    std::printf("%-20s %12s %8s %8s %8s %8s\n", "name", "pixel_error", "p5", "p10", "p15", "n");
    for (const CompareRow& r : rows) {
        std::printf("%-20s %12.4f %8.4f %8.4f %8.4f %8zu\n", r.name.c_str(), r.pixel_error, r.p5,
                    r.p10, r.p15, r.n_scored);
    }
}

VarianceMethod parse_method(const std::string& s) {
    if (s == "displacement") return VarianceMethod::Displacement;
    if (s == "velocity") return VarianceMethod::Velocity;
    if (s == "acceleration") return VarianceMethod::Acceleration;
    if (s == "covariance") return VarianceMethod::Covariance;
    if (s == "frequency") return VarianceMethod::Frequency;
    throw ArgumentError("unknown variance method '" + s + "'");
}

void write_matrix_csv(const fs::path& path, std::uint16_t width, std::uint16_t height,
                      const std::function<std::uint32_t(std::uint16_t, std::uint16_t)>& cell) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (std::uint16_t y = 0; y < height; ++y) {
        for (std::uint16_t x = 0; x < width; ++x) {
            if (x) out << ',';
            out << cell(x, y);
        }
        out << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

int cmd_simulate(const SimulateOpts& opts) {
    Scenario sc = load_scenario(opts.scenario);
    if (opts.seed_override >= 0) sc.config.seed = static_cast<std::uint64_t>(opts.seed_override);

    LabelTrack track = synth_trajectory(sc.script, sc.config.seed);
    EventStream stream = render_events(track, sc.config);

    ensure_dir(opts.out_dir);
    fs::path dir(opts.out_dir);
    write_events_csv(stream, dir / "events.csv");
    write_events_bin(stream, dir / "events.bin");
    write_labels_csv(track, dir / "labels.csv");
    std::printf("simulated %zu labels, %zu events -> %s\n", track.size(), stream.size(),
                opts.out_dir.c_str());
    return 0;
}

int cmd_convert(const ConvertOpts& opts) {
    EventStream stream = load_events(opts.in_path, opts.width, opts.height);
    if (fs::path(opts.out_path).extension() == ".bin") {
        write_events_bin(stream, opts.out_path);
    } else {
        write_events_csv(stream, opts.out_path);
    }
    std::printf("converted %zu events -> %s\n", stream.size(), opts.out_path.c_str());
    return 0;
}

int cmd_augment(const AugmentOpts& opts) {
    EventStream stream = load_events(opts.events, opts.width, opts.height);
    LabelTrack track = read_labels_csv(opts.labels);

    AugSpec spec;
    spec.shift_us = opts.shift_us;
    spec.flip_h = opts.flip_h;
    spec.flip_v = opts.flip_v;
    spec.delete_frac = opts.delete_frac;
    spec.seed = opts.seed;
    ShiftResult result = augment(stream, track, spec);
    if (result.empty_warning) {
        std::fprintf(stderr, "warning: augmentation left no overlapping events/labels\n");
    }

    ensure_dir(opts.out_dir);
    fs::path dir(opts.out_dir);
    write_events_csv(result.stream, dir / "events.csv");
    write_events_bin(result.stream, dir / "events.bin");
    write_labels_csv(result.track, dir / "labels.csv");
    std::printf("augmented: %zu events, %zu labels -> %s\n", result.stream.size(),
                result.track.size(), opts.out_dir.c_str());
    return 0;
}

int cmd_track(const TrackOpts& opts) {
    EventStream stream = load_events(opts.events, opts.width, opts.height);
    LabelTrack track = read_labels_csv(opts.labels);
    FrameStack stack = bin_to_frames(stream, track);

    Trajectory traj;
    if (opts.tracker == "centroid") {
        traj = centroid_track(stack, opts.decay, opts.min_events);
    } else if (opts.tracker == "linear") {
        Eigen::MatrixXd features = binary_features(stack, opts.fx, opts.fy);
        LinearModel model;
        if (!opts.model_in.empty()) {
            model = load_linear_model(opts.model_in);
        } else {
            TrainStats stats;
            model = train_linear(features, track, opts.lr, opts.epochs, opts.seed, &stats);
            std::printf("trained linear model: loss %.6f -> %.6f (%zu skipped)\n",
                        stats.initial_loss, stats.final_loss, stats.skipped_steps);
        }
        if (!opts.model_out.empty()) save_linear_model(model, opts.model_out);
        traj = predict_linear(model, features);
    } else {
        throw ArgumentError("unknown tracker '" + opts.tracker + "'");
    }

    std::uint32_t start = track.labels.empty() ? 0 : track.labels.front().index;
    write_trajectory_csv(traj, opts.out_path, start);
    std::printf("tracked %zu frames (%s) -> %s\n", traj.size(), opts.tracker.c_str(),
                opts.out_path.c_str());
    return 0;
}

int cmd_postprocess(const PostprocessOpts& opts) {
    Trajectory traj = read_trajectory_csv(opts.pred);

    if (opts.run_m2f) {
        M2FParams params;
        params.w_base = opts.w_base;
        params.w_min = opts.w_min;
        params.w_max = opts.w_max;
        params.percentile = opts.percentile;
        params.method = parse_method(opts.method);
        traj = m2f(traj, params);
    }
    if (opts.run_ofe) {
        if (opts.events.empty()) throw ArgumentError("--ofe needs --events");
        EventStream stream = load_events(opts.events, opts.width, opts.height);
        OFEParams params;
        params.tau = opts.tau;
        params.c = opts.count_threshold;
        params.gamma = opts.gamma;
        params.kappa = opts.kappa;
        traj = ofe(traj, stream, params);
    }
    std::uint32_t start = 0;
    if (opts.run_blink) {
        if (opts.events.empty() || opts.labels.empty()) {
            throw ArgumentError("--blink-override needs --events and --labels");
        }
        EventStream stream = load_events(opts.events, opts.width, opts.height);
        LabelTrack track = read_labels_csv(opts.labels);
        start = track.labels.empty() ? 0 : track.labels.front().index;
        FrameStack stack = bin_to_frames(stream, track);
        BlinkOverrideResult result = blink_override(traj, stack, opts.ratio_threshold);
        if (result.all_flagged) {
            std::fprintf(stderr, "warning: every frame hit the blink rule; passthrough\n");
        }
        traj = std::move(result.trajectory);
    } else if (!opts.labels.empty()) {
        LabelTrack track = read_labels_csv(opts.labels);
        start = track.labels.empty() ? 0 : track.labels.front().index;
    }

    write_trajectory_csv(traj, opts.out_path, start);
    std::printf("postprocessed %zu samples -> %s\n", traj.size(), opts.out_path.c_str());
    return 0;
}

int cmd_evaluate(const EvaluateOpts& opts) {
    std::vector<std::pair<std::string, fs::path>> pairs;  // name -> (pred, labels)
    std::vector<fs::path> label_paths;

    if (fs::is_directory(opts.pred)) {
        if (!fs::is_directory(opts.labels)) {
            throw ArgumentError("--pred is a directory, so --labels must be one too");
        }
        std::vector<fs::path> preds;
        for (const auto& entry : fs::directory_iterator(opts.pred)) {
            if (entry.path().extension() == ".csv") preds.push_back(entry.path());
        }
        std::sort(preds.begin(), preds.end());
        for (const fs::path& p : preds) {
            fs::path lbl = fs::path(opts.labels) / p.filename();
            if (!fs::exists(lbl)) throw Error("no labels for " + p.string() + " at " + lbl.string());
            pairs.push_back({p.stem().string(), p});
            label_paths.push_back(lbl);
        }
        if (pairs.empty()) throw Error("no .csv predictions found in " + opts.pred);
    } else {
        pairs.push_back({opts.name.empty() ? fs::path(opts.pred).stem().string() : opts.name,
                         fs::path(opts.pred)});
        label_paths.push_back(opts.labels);
    }

    std::vector<NamedReport> reports(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        Trajectory pred = read_trajectory_csv(pairs[i].second);
        LabelTrack gt = read_labels_csv(label_paths[i]);
        reports[i] = {pairs[i].first, pixel_error(pred, gt, !opts.include_blink)};
    });

    std::vector<CompareRow> rows = compare(reports);
    print_table(rows);
    write_report_csv(rows, opts.report_path);
    return 0;
}

int cmd_report(const ReportOpts& opts) {
    Trajectory pred = read_trajectory_csv(opts.pred);
    LabelTrack gt = read_labels_csv(opts.labels);
    EvalReport report = pixel_error(pred, gt, !opts.include_blink);

    ensure_dir(opts.out_dir);
    fs::path dir(opts.out_dir);
    std::string name = opts.name.empty() ? fs::path(opts.pred).stem().string() : opts.name;
    std::vector<NamedReport> reports = {{name, report}};
    std::vector<CompareRow> rows = compare(reports);
    write_report_csv(rows, dir / "report.csv");

    // sensor box for the plot: labels carry no geometry, so size it to the data
    double max_x = 1.0, max_y = 1.0;
    for (const Label& l : gt.labels) {
        max_x = std::max(max_x, l.x);
        max_y = std::max(max_y, l.y);
    }
    for (const Vec2& p : pred.points) {
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    auto fit = [](double v) {
        return static_cast<std::uint16_t>(std::min(65535.0, std::ceil(v + 1.0)));
    };
    write_trajectory_svg(pred, gt, fit(max_x), fit(max_y), dir / "trajectory.svg");

    print_table(rows);
    std::printf("report -> %s\n", (dir / "report.csv").string().c_str());
    return 0;
}

int cmd_dump(const DumpOpts& opts) {
    EventStream stream = load_events(opts.events, opts.width, opts.height);
    LabelTrack track = read_labels_csv(opts.labels);
    FrameStack stack = bin_to_frames(stream, track);
    ensure_dir(opts.out_dir);
    fs::path dir(opts.out_dir);

    std::vector<Frame> frames;
    frames.reserve(stack.frames.size());
    for (const Frame& f : stack.frames) {
        frames.push_back(opts.fx == 1 && opts.fy == 1 ? f : downsample(f, opts.fx, opts.fy));
    }

    if (opts.mode == "binarep") {
        if (opts.bits < 1 || opts.bits > 16) throw ArgumentError("--bits must lie in [1, 16]");
        if (opts.start + opts.bits > frames.size()) {
            throw ArgumentError("binarep window exceeds the frame count");
        }
        std::vector<BinaryGrid> grids;
        for (int k = 0; k < opts.bits; ++k) grids.push_back(binarize(frames[opts.start + k]));
        BinaRep rep = bina_rep(grids);
        write_matrix_csv(dir / "binarep.csv", rep.width, rep.height,
                         [&](std::uint16_t x, std::uint16_t y) { return rep.at(x, y); });
        std::printf("dumped bina-rep of %d frames -> %s\n", opts.bits,
                    (dir / "binarep.csv").string().c_str());
        return 0;
    }

    for (std::size_t i = 0; i < frames.size(); ++i) {
        const Frame& f = frames[i];
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.csv", i);
        auto cell = [&](std::uint16_t x, std::uint16_t y) -> std::uint32_t {
            if (opts.mode == "pos") return f.pos(x, y);
            if (opts.mode == "neg") return f.neg(x, y);
            if (opts.mode == "binary") return f.pos(x, y) + f.neg(x, y) > 0 ? 1 : 0;
            if (opts.mode == "sum") return f.pos(x, y) + f.neg(x, y);
            throw ArgumentError("unknown dump mode '" + opts.mode + "'");
        };
        write_matrix_csv(dir / name, f.width, f.height, cell);
    }
    std::printf("dumped %zu frames (%s) -> %s\n", frames.size(), opts.mode.c_str(),
                opts.out_dir.c_str());
    return 0;
}

}  // namespace evio::cli
