// evio - event-based eye tracking toolkit
//
// One binary, subcommand style: simulate, convert, augment, track,
// postprocess, evaluate, report, dump. Every stochastic stage takes --seed;
// outputs are reproducible from flags + seed alone.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "evio/error.hpp"

using namespace evio::cli;

int main(int argc, char** argv) {
    CLI::App app{"evio - event-based eye tracking toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "synthesize a labeled DVS recording");
    c_sim->add_option("--scenario", sim.scenario, "scenario JSON file")->required();
    c_sim->add_option("--out", sim.out_dir, "output directory")->required();
    c_sim->add_option("--seed", sim.seed_override, "override the scenario RNG seed");

    ConvertOpts conv;
    CLI::App* c_conv = app.add_subcommand("convert", "convert events between CSV and EVIO binary");
    c_conv->add_option("--in", conv.in_path, "input events (.csv or .bin)")->required();
    c_conv->add_option("--out", conv.out_path, "output events (.csv or .bin)")->required();
    c_conv->add_option("--width", conv.width, "sensor width for CSV input");
    c_conv->add_option("--height", conv.height, "sensor height for CSV input");

    AugmentOpts aug;
    CLI::App* c_aug = app.add_subcommand("augment", "temporal shift, spatial flip, event deletion");
    c_aug->add_option("--events", aug.events, "input events (.csv or .bin)")->required();
    c_aug->add_option("--labels", aug.labels, "input labels CSV")->required();
    c_aug->add_option("--out", aug.out_dir, "output directory")->required();
    c_aug->add_option("--shift-us", aug.shift_us, "timestamp shift in [-200000, 200000]");
    c_aug->add_flag("--flip-h", aug.flip_h, "mirror horizontally");
    c_aug->add_flag("--flip-v", aug.flip_v, "mirror vertically");
    c_aug->add_option("--delete-frac", aug.delete_frac, "event deletion probability");
    c_aug->add_option("--seed", aug.seed, "deletion RNG seed");
    c_aug->add_option("--width", aug.width, "sensor width for CSV input");
    c_aug->add_option("--height", aug.height, "sensor height for CSV input");

    TrackOpts trk;
    CLI::App* c_trk = app.add_subcommand("track", "predict pupil centers from events");
    c_trk->add_option("--events", trk.events, "input events (.csv or .bin)")->required();
    c_trk->add_option("--labels", trk.labels, "labels CSV (binning grid + linear training)")
        ->required();
    c_trk->add_option("--out", trk.out_path, "output trajectory CSV")->required();
    c_trk->add_option("--tracker", trk.tracker, "centroid | linear")
        ->check(CLI::IsMember({"centroid", "linear"}));
    c_trk->add_option("--decay", trk.decay, "centroid activity half-life in frames");
    c_trk->add_option("--min-events", trk.min_events, "centroid hold threshold");
    c_trk->add_option("--model", trk.model_in, "load a linear model instead of training");
    c_trk->add_option("--save-model", trk.model_out, "write the linear model CSV");
    c_trk->add_option("--lr", trk.lr, "linear training learning rate");
    c_trk->add_option("--epochs", trk.epochs, "linear training epochs");
    c_trk->add_option("--fx", trk.fx, "feature downsample factor x");
    c_trk->add_option("--fy", trk.fy, "feature downsample factor y");
    c_trk->add_option("--seed", trk.seed, "training seed");
    c_trk->add_option("--width", trk.width, "sensor width for CSV input");
    c_trk->add_option("--height", trk.height, "sensor height for CSV input");

    PostprocessOpts post;
    CLI::App* c_post = app.add_subcommand("postprocess", "refine a predicted trajectory");
    c_post->add_option("--pred", post.pred, "input trajectory CSV")->required();
    c_post->add_option("--out", post.out_path, "output trajectory CSV")->required();
    c_post->add_flag("--m2f", post.run_m2f, "motion-aware median filtering");
    c_post->add_flag("--ofe", post.run_ofe, "optical-flow refinement (needs --events)");
    c_post->add_flag("--blink-override", post.run_blink,
                     "polarity-ratio blink override (needs --events and --labels)");
    c_post->add_option("--events", post.events, "events for --ofe/--blink-override");
    c_post->add_option("--labels", post.labels, "labels for --blink-override");
    c_post->add_option("--method", post.method,
                       "variance method: displacement|velocity|acceleration|covariance|frequency");
    c_post->add_option("--w-base", post.w_base, "variance/smoothing window");
    c_post->add_option("--w-min", post.w_min, "smallest median window (odd)");
    c_post->add_option("--w-max", post.w_max, "largest median window (odd)");
    c_post->add_option("--percentile", post.percentile, "adaptive window percentile");
    c_post->add_option("--tau", post.tau, "OFE scaling parameter");
    c_post->add_option("--c", post.count_threshold, "OFE history length");
    c_post->add_option("--gamma", post.gamma, "OFE difference threshold");
    c_post->add_option("--kappa", post.kappa, "OFE ROI expand/shrink fraction");
    c_post->add_option("--ratio-threshold", post.ratio_threshold, "blink pos/neg ratio");
    c_post->add_option("--width", post.width, "sensor width for CSV input");
    c_post->add_option("--height", post.height, "sensor height for CSV input");

    EvaluateOpts ev;
    CLI::App* c_ev = app.add_subcommand("evaluate", "score predictions against labels");
    c_ev->add_option("--pred", ev.pred, "trajectory CSV or a directory of them")->required();
    c_ev->add_option("--labels", ev.labels, "labels CSV or a directory of them")->required();
    c_ev->add_flag("--include-blink", ev.include_blink, "score blink frames too");
    c_ev->add_option("--report", ev.report_path, "where to write report.csv");
    c_ev->add_option("--name", ev.name, "row name (single-file mode)");

    ReportOpts rep;
    CLI::App* c_rep = app.add_subcommand("report", "report.csv + trajectory.svg for one recording");
    c_rep->add_option("--pred", rep.pred, "trajectory CSV")->required();
    c_rep->add_option("--labels", rep.labels, "labels CSV")->required();
    c_rep->add_option("--out", rep.out_dir, "output directory")->required();
    c_rep->add_flag("--include-blink", rep.include_blink, "score blink frames too");
    c_rep->add_option("--name", rep.name, "report row name");

    DumpOpts dump;
    CLI::App* c_dump = app.add_subcommand("dump", "export binned frames as CSV matrices");
    c_dump->add_option("--events", dump.events, "input events (.csv or .bin)")->required();
    c_dump->add_option("--labels", dump.labels, "labels CSV (binning grid)")->required();
    c_dump->add_option("--out", dump.out_dir, "output directory")->required();
    c_dump->add_option("--mode", dump.mode, "sum | pos | neg | binary | binarep")
        ->check(CLI::IsMember({"sum", "pos", "neg", "binary", "binarep"}));
    c_dump->add_option("--bits", dump.bits, "bina-rep bit count");
    c_dump->add_option("--start", dump.start, "bina-rep first frame");
    c_dump->add_option("--fx", dump.fx, "downsample factor x");
    c_dump->add_option("--fy", dump.fy, "downsample factor y");
    c_dump->add_option("--width", dump.width, "sensor width for CSV input");
    c_dump->add_option("--height", dump.height, "sensor height for CSV input");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (*c_sim) return cmd_simulate(sim);
        if (*c_conv) return cmd_convert(conv);
        if (*c_aug) return cmd_augment(aug);
        if (*c_trk) return cmd_track(trk);
        if (*c_post) return cmd_postprocess(post);
        if (*c_ev) return cmd_evaluate(ev);
        if (*c_rep) return cmd_report(rep);
        if (*c_dump) return cmd_dump(dump);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
