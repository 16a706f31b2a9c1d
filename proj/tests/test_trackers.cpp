#include <doctest.h>

#include <random>

#include "evio/metrics.hpp"
#include "evio/simulator.hpp"
#include "evio/trackers.hpp"
#include "test_support.hpp"

using namespace evio;

namespace {

FrameStack single_frame_stack(std::uint16_t w, std::uint16_t h) {
    FrameStack stack;
    stack.frames.emplace_back(w, h);
    return stack;
}

bool exact_eq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("centroid: point mass lands exactly on the pixel") {
    FrameStack stack = single_frame_stack(32, 16);
    stack.frames[0].counts_pos[stack.frames[0].idx(12, 7)] = 5;
    stack.frames[0].counts_neg[stack.frames[0].idx(12, 7)] = 2;
    Trajectory traj = centroid_track(stack, 1.0, 1.0);
    REQUIRE(traj.size() == 1);
    CHECK(traj.points[0] == Vec2{12.0, 7.0});
}

TEST_CASE("centroid: empty prefix falls back to the frame center") {
    FrameStack stack;
    stack.frames.emplace_back(32, 16);
    stack.frames.emplace_back(32, 16);
    stack.frames.emplace_back(32, 16);
    stack.frames[2].counts_pos[stack.frames[2].idx(4, 4)] = 1;
    Trajectory traj = centroid_track(stack, 2.0, 1.0);
    REQUIRE(traj.size() == 3);
    CHECK(traj.points[0] == Vec2{16.0, 8.0});
    CHECK(traj.points[1] == Vec2{16.0, 8.0});
    CHECK(traj.points[2] == Vec2{4.0, 4.0});
}

TEST_CASE("centroid: equal masses average their positions") {
    FrameStack stack = single_frame_stack(16, 16);
    stack.frames[0].counts_pos[stack.frames[0].idx(0, 0)] = 3;
    stack.frames[0].counts_pos[stack.frames[0].idx(10, 0)] = 3;
    Trajectory traj = centroid_track(stack, 1.0, 1.0);
    CHECK(traj.points[0] == Vec2{5.0, 0.0});
}

TEST_CASE("centroid: low-activity frames repeat the previous prediction") {
    FrameStack stack;
    stack.frames.emplace_back(16, 16);
    stack.frames.emplace_back(16, 16);
    stack.frames[0].counts_pos[stack.frames[0].idx(3, 9)] = 50;
    Trajectory traj = centroid_track(stack, 0.5, 10.0);  // decays to 12.5 < min_events? no: 12.5 > 10
    CHECK(traj.points[1] == Vec2{3.0, 9.0});

    Trajectory strict = centroid_track(stack, 0.5, 20.0);  // 12.5 < 20 -> hold
    CHECK(strict.points[1] == strict.points[0]);
    CHECK_THROWS_AS(centroid_track(stack, 0.0, 1.0), ArgumentError);
}

TEST_CASE("centroid predictions stay inside the active bounding box") {
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<int> coord(0, 15), cnt(1, 9);
    FrameStack stack;
    double min_x = 16, max_x = -1, min_y = 16, max_y = -1;
    for (int f = 0; f < 20; ++f) {
        Frame frame(16, 16);
        for (int k = 0; k < 5; ++k) {
            int x = coord(rng), y = coord(rng);
            frame.counts_pos[frame.idx(x, y)] += cnt(rng);
            min_x = std::min(min_x, double(x));
            max_x = std::max(max_x, double(x));
            min_y = std::min(min_y, double(y));
            max_y = std::max(max_y, double(y));
        }
        stack.frames.push_back(std::move(frame));
    }
    for (const Vec2& p : centroid_track(stack, 2.0, 1.0).points) {
        CHECK(p.x >= min_x);
        CHECK(p.x <= max_x);
        CHECK(p.y >= min_y);
        CHECK(p.y <= max_y);
    }
}

TEST_CASE("build_bias matches the closed forms") {
    AttentionConfig cfg;
    cfg.seq_len = 3;
    cfg.heads = 1;
    cfg.key_dim = 4;
    cfg.slopes = {-1.0};
    auto bias = build_bias(cfg);
    REQUIRE(bias.size() == 1);

    Eigen::Matrix3d fwd;
    fwd << 0, 0, 0, -1, 0, 0, -2, -1, 0;
    CHECK(exact_eq(bias[0].forward, fwd));
    Eigen::Matrix3d bwd;
    bwd << 0, -1, -2, 0, 0, -1, 0, 0, 0;
    CHECK(exact_eq(bias[0].backward, bwd));
    Eigen::Matrix3d combined;
    combined << 0, -1, -2, -1, 0, -1, -2, -1, 0;
    CHECK(exact_eq(bias[0].combined, combined));  // B[t][s] = -|t-s|
}

TEST_CASE("bias properties hold for every T and slope schedule") {
    for (std::size_t t_len = 1; t_len <= 16; ++t_len) {
        AttentionConfig cfg;
        cfg.seq_len = t_len;
        cfg.heads = 4;
        cfg.key_dim = 2;
        cfg.slopes = default_slopes(4);
        auto heads = build_bias(cfg);
        REQUIRE(heads.size() == 4);
        for (std::size_t i = 0; i < heads.size(); ++i) {
            double m = cfg.slopes[i];
            const auto& b = heads[i];
            CHECK(exact_eq(b.combined, b.forward + b.backward));
            for (Eigen::Index t = 0; t < b.combined.rows(); ++t) {
                CHECK(b.combined(t, t) == 0.0);
                for (Eigen::Index s = 0; s < b.combined.cols(); ++s) {
                    CHECK(b.combined(t, s) == m * std::abs(double(t) - double(s)));
                    CHECK(b.combined(t, s) == b.combined(s, t));
                }
            }
        }
    }
}

TEST_CASE("slope schedules must be strictly decreasing and negative") {
    auto m = default_slopes(4);
    REQUIRE(m.size() == 4);
    CHECK(m[0] == -0.25);
    CHECK(m[3] == -1.0);
    for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] < m[i - 1]);

    AttentionConfig bad;
    bad.seq_len = 4;
    bad.heads = 2;
    bad.key_dim = 2;
    bad.slopes = {-0.5, -0.5};
    CHECK_THROWS_AS(build_bias(bad), ArgumentError);
    bad.slopes = {0.5, -0.5};
    CHECK_THROWS_AS(build_bias(bad), ArgumentError);
    bad.slopes = {-0.5};
    CHECK_THROWS_AS(build_bias(bad), ArgumentError);
}

TEST_CASE("attention with zero logits averages the value rows") {
    const Eigen::Index t_len = 5, d_v = 3;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(t_len, 2);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(t_len, 2);
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(t_len, d_v);
    Eigen::MatrixXd bias = Eigen::MatrixXd::Zero(t_len, t_len);

    Eigen::MatrixXd out = attention_head(q, k, v, bias);
    Eigen::RowVectorXd mean = v.colwise().mean();
    for (Eigen::Index t = 0; t < t_len; ++t) {
        CHECK((out.row(t) - mean).cwiseAbs().maxCoeff() < 1e-12);
    }

    // permuting the value rows in the uniform case changes nothing
    Eigen::MatrixXd shuffled = v;
    shuffled.row(0).swap(shuffled.row(3));
    CHECK((attention_head(q, k, shuffled, bias) - out).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("strongly negative off-diagonal bias makes attention the identity") {
    const Eigen::Index t_len = 6;
    AttentionConfig cfg;
    cfg.seq_len = t_len;
    cfg.heads = 1;
    cfg.key_dim = 2;
    cfg.slopes = {-1000.0};
    auto bias = build_bias(cfg);

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(t_len, 2);
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(t_len, t_len);
    Eigen::MatrixXd out = attention_head(q, q, v, bias[0].combined);
    CHECK((out - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("softmax rows sum to one and ignore per-row logit shifts") {
    std::mt19937_64 rng(59);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const Eigen::Index t_len = 9, d_k = 4;
    auto fill = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = gauss(rng);
        }
    };
    Eigen::MatrixXd q(t_len, d_k), k(t_len, d_k), bias(t_len, t_len);
    fill(q);
    fill(k);
    fill(bias);

    // with V = I the attention output is the softmax matrix itself
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(t_len, t_len);
    Eigen::MatrixXd probs = attention_head(q, k, id, bias);
    for (Eigen::Index r = 0; r < t_len; ++r) {
        CHECK(std::abs(probs.row(r).sum() - 1.0) < 1e-6);
        for (Eigen::Index c = 0; c < t_len; ++c) CHECK(probs(r, c) >= 0.0);
    }

    // shifting every logit of one query row leaves that row unchanged
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(t_len, 3);
    Eigen::MatrixXd base = attention_head(q, k, v, bias);
    Eigen::MatrixXd shifted_bias = bias;
    shifted_bias.row(4).array() += 123.0;
    Eigen::MatrixXd shifted = attention_head(q, k, v, shifted_bias);
    CHECK((shifted.row(4) - base.row(4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bidirectional_attention validates per-head shapes") {
    AttentionConfig cfg;
    cfg.seq_len = 4;
    cfg.heads = 2;
    cfg.key_dim = 3;
    cfg.slopes = default_slopes(2);

    std::vector<Eigen::MatrixXd> q(2, Eigen::MatrixXd::Zero(4, 3));
    std::vector<Eigen::MatrixXd> v(2, Eigen::MatrixXd::Random(4, 5));
    auto out = bidirectional_attention(q, q, v, cfg);
    REQUIRE(out.size() == 2);
    CHECK(out[0].rows() == 4);
    CHECK(out[0].cols() == 5);

    std::vector<Eigen::MatrixXd> bad_q(2, Eigen::MatrixXd::Zero(3, 3));
    CHECK_THROWS_AS(bidirectional_attention(bad_q, q, v, cfg), ArgumentError);
    std::vector<Eigen::MatrixXd> missing(1, Eigen::MatrixXd::Zero(4, 3));
    CHECK_THROWS_AS(bidirectional_attention(missing, q, v, cfg), ArgumentError);
    CHECK_THROWS_AS(attention_head(Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(4, 2),
                                   Eigen::MatrixXd::Zero(4, 1), Eigen::MatrixXd::Zero(4, 4)),
                    ArgumentError);
}

TEST_CASE("rmse_time_loss: the pinned arithmetic cases") {
    std::vector<Vec2> a = {{1, 2}, {3, 4}};
    CHECK(rmse_time_loss(a, a) == 0.0);

    std::vector<Vec2> pred = {{3, 4}};
    std::vector<Vec2> gt = {{0, 0}};
    CHECK(rmse_time_loss(pred, gt) == 5.0);

    std::vector<Vec2> pred4(4, Vec2{3, 4});
    std::vector<Vec2> gt4(4, Vec2{0, 0});
    CHECK(rmse_time_loss(pred4, gt4) == 2.5);

    CHECK_THROWS_AS(rmse_time_loss({}, {}), ArgumentError);
    CHECK_THROWS_AS(rmse_time_loss(pred, a), ArgumentError);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::Index n = 12, dim = 5;
    const double step = 1e-5;

    for (int point = 0; point < 10; ++point) {
        Eigen::MatrixXd features(n, dim);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < dim; ++c) features(r, c) = gauss(rng);
        }
        if (point == 0) features.setZero();  // all-zero features: bias-only gradient
        std::vector<Vec2> targets;
        for (Eigen::Index r = 0; r < n; ++r) targets.push_back({gauss(rng), gauss(rng)});

        LinearModel model;
        model.weights = Eigen::MatrixXd::Zero(2, dim);
        for (Eigen::Index c = 0; c < dim; ++c) {
            model.weights(0, c) = gauss(rng);
            model.weights(1, c) = gauss(rng);
        }
        model.bias = {gauss(rng), gauss(rng)};

        LossGrad g = linear_loss_gradient(model, features, targets);
        REQUIRE_FALSE(g.singular);

        auto loss_at = [&](const LinearModel& m) {
            return linear_loss_gradient(m, features, targets).loss;
        };
        auto check_grad = [&](double analytic, double numeric) {
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            CHECK(std::abs(analytic - numeric) / denom < 1e-4);
        };

        for (int r = 0; r < 2; ++r) {
            for (Eigen::Index c = 0; c < dim; ++c) {
                LinearModel up = model, down = model;
                up.weights(r, c) += step;
                down.weights(r, c) -= step;
                check_grad(g.d_weights(r, c), (loss_at(up) - loss_at(down)) / (2 * step));
            }
            LinearModel up = model, down = model;
            up.bias(r) += step;
            down.bias(r) -= step;
            check_grad(g.d_bias(r), (loss_at(up) - loss_at(down)) / (2 * step));
        }
    }
}

TEST_CASE("train_linear: a single sample is exactly fit at initialization") {
    Eigen::MatrixXd features(1, 3);
    features << 1.0, 0.0, 2.0;
    LabelTrack track;
    track.labels.push_back({0, 0, 33.25, 21.5, false});

    TrainStats stats;
    LinearModel model = train_linear(features, track, 0.1, 500, 1, &stats);
    CHECK(stats.final_loss < 1e-6);
    CHECK(stats.final_loss == 0.0);  // bias starts at the label centroid
    CHECK(stats.skipped_steps == 500);
    CHECK(predict_linear(model, features).points[0] == Vec2{33.25, 21.5});
}

TEST_CASE("train_linear: lr = 0 leaves the initialization untouched") {
    std::mt19937_64 rng(67);
    LabelTrack track = testutil::random_track(rng, 20, 64, 48);
    Eigen::MatrixXd features = Eigen::MatrixXd::Random(20, 4);

    LinearModel model = train_linear(features, track, 0.0, 50, 1);
    CHECK(exact_eq(model.weights, Eigen::MatrixXd::Zero(2, 4)));
    double mean_x = 0, mean_y = 0;
    for (const Label& l : track.labels) {
        mean_x += l.x;
        mean_y += l.y;
    }
    CHECK(model.bias(0) == doctest::Approx(mean_x / 20).epsilon(1e-12));
    CHECK(model.bias(1) == doctest::Approx(mean_y / 20).epsilon(1e-12));

    CHECK_THROWS_AS(train_linear(features, track, -0.1, 10, 1), ArgumentError);
}

TEST_CASE("train_linear reduces the loss on structured data") {
    // one-hot features indexing positions: an exactly fittable problem
    const std::size_t n = 40;
    Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n, 8);
    LabelTrack track;
    for (std::size_t i = 0; i < n; ++i) {
        features(i, i % 8) = 1.0;
        track.labels.push_back({static_cast<std::uint32_t>(i), i * kLabelPeriodUs,
                                10.0 + 3.0 * (i % 8), 20.0 + 1.0 * (i % 8), false});
    }
    TrainStats stats;
    train_linear(features, track, 0.5, 4000, 1, &stats);
    CHECK(stats.final_loss < stats.initial_loss * 0.05);
}

TEST_CASE("predict_linear applies the affine map") {
    LinearModel model;
    model.weights = Eigen::MatrixXd::Zero(2, 4);
    model.bias = {40.0, 30.0};
    Eigen::MatrixXd features = Eigen::MatrixXd::Random(6, 4);
    Trajectory traj = predict_linear(model, features);
    REQUIRE(traj.size() == 6);
    for (const Vec2& p : traj.points) CHECK(p == Vec2{40.0, 30.0});

    // one-hot feature reads the selected weight column
    model.weights(0, 2) = 7.0;
    model.weights(1, 2) = -2.0;
    Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(1, 4);
    one_hot(0, 2) = 1.0;
    CHECK(predict_linear(model, one_hot).points[0] == Vec2{47.0, 28.0});

    Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(1, 3);
    CHECK_THROWS_AS(predict_linear(model, wrong), ArgumentError);
}

TEST_CASE("trained linear readout beats the centroid baseline on noisy data") {
    MotionScript script;
    script.width = 80;
    script.height = 60;
    script.margin = 4.0;
    Segment start;
    start.kind = SegmentKind::Fixation;
    start.duration_us = 200'000;
    start.target = Vec2{40, 30};
    start.jitter_px = 0.0;
    Segment pursuit;
    pursuit.kind = SegmentKind::Pursuit;
    pursuit.duration_us = 2'800'000;
    pursuit.amplitude_px = 15.0;
    pursuit.frequency_hz = 1.5;
    script.segments = {start, pursuit};
    LabelTrack track = synth_trajectory(script, 5);

    SimConfig cfg;
    cfg.width = 80;
    cfg.height = 60;
    cfg.pupil_radius = 3.0;
    cfg.contrast = 0.8;
    cfg.threshold = 0.2;
    cfg.frame_dt_us = 500;
    cfg.noise_rate_hz = 1.0;  // background noise drags the centroid toward the sensor center
    cfg.seed = 5;
    FrameStack stack = bin_to_frames(render_events(track, cfg), track);

    Trajectory cent = centroid_track(stack, 2.0, 1.0);
    Eigen::MatrixXd features = binary_features(stack, 4, 4);
    TrainStats stats;
    LinearModel model = train_linear(features, track, 0.5, 600, 1, &stats);
    Trajectory lin = predict_linear(model, features);

    CHECK(stats.final_loss < stats.initial_loss);
    double centroid_err = pixel_error(cent, track, true).pixel_error;
    double linear_err = pixel_error(lin, track, true).pixel_error;
    CHECK(linear_err < centroid_err);
}

TEST_CASE("windowed training segments: loss per sliding window") {
    // windowed sampling: each window is an independent loss segment
    std::vector<Vec2> gt, pred;
    for (int i = 0; i < 12; ++i) {
        gt.push_back({double(i), 2.0 * i});
        pred.push_back({double(i) + 3.0, 2.0 * i + 4.0});  // constant (3,4) residual
    }
    WindowSpec spec{4, 2, 2};
    auto windows = sliding_windows(gt.size(), spec);
    REQUIRE_FALSE(windows.empty());
    for (const auto& w : windows) {
        std::vector<Vec2> gs, ps;
        for (std::size_t idx : w) {
            gs.push_back(gt[idx]);
            ps.push_back(pred[idx]);
        }
        // T residuals of norm 5: loss = sqrt(T * 25) / T = 5 / sqrt(T)
        CHECK(rmse_time_loss(ps, gs) ==
              doctest::Approx(5.0 / std::sqrt(double(spec.length))).epsilon(1e-12));
    }
}

TEST_CASE("linear model CSV round-trips at full precision") {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> gauss(0.0, 10.0);
    LinearModel model;
    model.weights = Eigen::MatrixXd::Zero(2, 6);
    for (Eigen::Index c = 0; c < 6; ++c) {
        model.weights(0, c) = gauss(rng);
        model.weights(1, c) = gauss(rng);
    }
    model.bias = {gauss(rng), gauss(rng)};

    testutil::TempDir dir("model");
    save_linear_model(model, dir.file("m.csv"));
    LinearModel back = load_linear_model(dir.file("m.csv"));
    CHECK(exact_eq(back.weights, model.weights));
    CHECK(exact_eq(back.bias, model.bias));
}
