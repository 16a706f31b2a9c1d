#include "evio/trackers.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace evio {

Trajectory centroid_track(const FrameStack& stack, double decay, double min_events) {
    if (decay <= 0.0) throw ArgumentError("centroid_track: decay must be > 0");

    Trajectory traj;
    traj.source = "centroid";
    traj.points.reserve(stack.frames.size());
    if (stack.frames.empty()) return traj;

    const double keep = std::exp2(-1.0 / decay);
    const Frame& first = stack.frames.front();
    std::vector<double> activity(static_cast<std::size_t>(first.width) * first.height, 0.0);
    Vec2 prev{first.width / 2.0, first.height / 2.0};  // fallback before any activity

    for (const Frame& frame : stack.frames) {
        double sum = 0.0, sx = 0.0, sy = 0.0;
        std::size_t i = 0;
        for (std::uint16_t y = 0; y < frame.height; ++y) {
            for (std::uint16_t x = 0; x < frame.width; ++x, ++i) {
                double a = activity[i] * keep + frame.counts_pos[i] + frame.counts_neg[i];
                activity[i] = a;
                sum += a;
                sx += a * x;
                sy += a * y;
            }
        }
        Vec2 p = (sum < min_events || sum <= 0.0) ? prev : Vec2{sx / sum, sy / sum};
        traj.points.push_back(p);
        prev = p;
    }
    return traj;
}

std::vector<double> default_slopes(std::size_t heads) {
    std::vector<double> m(heads);
    for (std::size_t i = 0; i < heads; ++i) m[i] = -static_cast<double>(i + 1) / heads;
    return m;
}

void validate(const AttentionConfig& cfg) {
    if (cfg.seq_len < 1 || cfg.heads < 1 || cfg.key_dim < 1) {
        throw ArgumentError("attention config: T, h and d_k must all be >= 1");
    }
    if (cfg.slopes.size() != cfg.heads) {
        throw ArgumentError("attention config: need one slope per head");
    }
    for (std::size_t i = 0; i < cfg.slopes.size(); ++i) {
        if (cfg.slopes[i] >= 0.0) throw ArgumentError("attention config: slopes must be < 0");
        if (i > 0 && cfg.slopes[i] >= cfg.slopes[i - 1]) {
            throw ArgumentError("attention config: slopes must be strictly decreasing");
        }
    }
}

std::vector<BiasMatrices> build_bias(const AttentionConfig& cfg) {
    validate(cfg);
    const auto t_len = static_cast<Eigen::Index>(cfg.seq_len);
    std::vector<BiasMatrices> heads;
    heads.reserve(cfg.heads);
    for (double m : cfg.slopes) {
        BiasMatrices b{Eigen::MatrixXd::Zero(t_len, t_len), Eigen::MatrixXd::Zero(t_len, t_len),
                       Eigen::MatrixXd::Zero(t_len, t_len)};
        for (Eigen::Index t = 0; t < t_len; ++t) {
            for (Eigen::Index s = 0; s < t_len; ++s) {
                if (t >= s) {
                    b.forward(t, s) = m * static_cast<double>(t - s);
                } else {
                    b.backward(t, s) = m * static_cast<double>(s - t);
                }
            }
        }
        b.combined = b.forward + b.backward;
        heads.push_back(std::move(b));
    }
    return heads;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        double mx = logits.row(r).maxCoeff();
        Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
        out.row(r) = e / e.sum();
    }
    return out;
}

Eigen::MatrixXd attention_head(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k,
                               const Eigen::MatrixXd& v, const Eigen::MatrixXd& bias) {
    const Eigen::Index t_len = q.rows();
    if (k.rows() != t_len || v.rows() != t_len || q.cols() != k.cols() || bias.rows() != t_len ||
        bias.cols() != t_len) {
        throw ArgumentError("attention_head: inconsistent shapes");
    }
    if (q.cols() < 1) throw ArgumentError("attention_head: d_k must be >= 1");
    Eigen::MatrixXd logits = q * k.transpose() / std::sqrt(static_cast<double>(q.cols())) + bias;
    return softmax_rows(logits) * v;
}

std::vector<Eigen::MatrixXd> bidirectional_attention(std::span<const Eigen::MatrixXd> q,
                                            std::span<const Eigen::MatrixXd> k,
                                            std::span<const Eigen::MatrixXd> v,
                                            const AttentionConfig& cfg) {
    validate(cfg);
    if (q.size() != cfg.heads || k.size() != cfg.heads || v.size() != cfg.heads) {
        throw ArgumentError("bidirectional_attention: need Q, K, V for every head");
    }
    std::vector<BiasMatrices> bias = build_bias(cfg);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(cfg.heads);
    for (std::size_t i = 0; i < cfg.heads; ++i) {
        if (q[i].rows() != static_cast<Eigen::Index>(cfg.seq_len) ||
            q[i].cols() != static_cast<Eigen::Index>(cfg.key_dim)) {
            throw ArgumentError("bidirectional_attention: head " + std::to_string(i) + " shape mismatch");
        }
        out.push_back(attention_head(q[i], k[i], v[i], bias[i].combined));
    }
    return out;
}

double rmse_time_loss(std::span<const Vec2> pred, std::span<const Vec2> label) {
    if (pred.size() != label.size()) throw ArgumentError("rmse_time_loss: length mismatch");
    if (pred.empty()) throw ArgumentError("rmse_time_loss: empty segment");
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t) {
        double dx = pred[t].x - label[t].x;
        double dy = pred[t].y - label[t].y;
        sum_sq += dx * dx + dy * dy;
    }
    return std::sqrt(sum_sq) / static_cast<double>(pred.size());
}

LossGrad linear_loss_gradient(const LinearModel& model, const Eigen::MatrixXd& features,
                              const std::vector<Vec2>& targets) {
    const Eigen::Index n = features.rows();
    if (n == 0) throw ArgumentError("linear_loss_gradient: empty batch");
    if (static_cast<std::size_t>(n) != targets.size()) {
        throw ArgumentError("linear_loss_gradient: feature/target length mismatch");
    }
    if (features.cols() != model.weights.cols()) {
        throw ArgumentError("linear_loss_gradient: feature dimension mismatch");
    }

    // residuals r_t = W f_t + b - label_t
    Eigen::MatrixXd resid(n, 2);
    Eigen::MatrixXd pred = features * model.weights.transpose();
    for (Eigen::Index t = 0; t < n; ++t) {
        resid(t, 0) = pred(t, 0) + model.bias(0) - targets[t].x;
        resid(t, 1) = pred(t, 1) + model.bias(1) - targets[t].y;
    }

    LossGrad g;
    g.d_weights = Eigen::MatrixXd::Zero(2, features.cols());
    g.d_bias.setZero();
    double sum_sq = resid.squaredNorm();
    double t_count = static_cast<double>(n);
    g.loss = std::sqrt(sum_sq) / t_count;
    if (sum_sq == 0.0) {
        g.singular = true;
        return g;
    }
    // dL/dr_t = r_t / (T * sqrt(sum_sq)), chained through W and b
    Eigen::MatrixXd dl_dr = resid / (t_count * std::sqrt(sum_sq));
    g.d_weights = dl_dr.transpose() * features;
    g.d_bias = dl_dr.colwise().sum().transpose();
    return g;
}

LinearModel train_linear(const Eigen::MatrixXd& features, const LabelTrack& track, double lr,
                         std::size_t epochs, std::uint64_t /*seed*/, TrainStats* stats) {
    if (lr < 0.0) throw ArgumentError("train_linear: lr must be >= 0");
    if (static_cast<std::size_t>(features.rows()) != track.labels.size()) {
        throw ArgumentError("train_linear: feature rows must match the track length");
    }
    if (track.labels.empty()) throw ArgumentError("train_linear: empty track");

    std::vector<Vec2> targets;
    targets.reserve(track.labels.size());
    Eigen::Vector2d mean{0.0, 0.0};
    for (const Label& l : track.labels) {
        targets.push_back({l.x, l.y});
        mean(0) += l.x;
        mean(1) += l.y;
    }
    mean /= static_cast<double>(track.labels.size());

    LinearModel model;
    model.weights = Eigen::MatrixXd::Zero(2, features.cols());
    model.bias = mean;

    TrainStats local;
    local.initial_loss = linear_loss_gradient(model, features, targets).loss;
    local.final_loss = local.initial_loss;
    for (std::size_t e = 0; e < epochs; ++e) {
        LossGrad g = linear_loss_gradient(model, features, targets);
        local.final_loss = g.loss;
        if (g.singular) {
            ++local.skipped_steps;  // already at the optimum, nothing to do
            continue;
        }
        model.weights -= lr * g.d_weights;
        model.bias -= lr * g.d_bias;
    }
    if (stats) *stats = local;
    return model;
}

Trajectory predict_linear(const LinearModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.weights.cols()) {
        throw ArgumentError("predict_linear: feature dimension mismatch");
    }
    Trajectory traj;
    traj.source = "linear";
    traj.points.reserve(static_cast<std::size_t>(features.rows()));
    Eigen::MatrixXd pred = features * model.weights.transpose();
    for (Eigen::Index t = 0; t < features.rows(); ++t) {
        traj.points.push_back({pred(t, 0) + model.bias(0), pred(t, 1) + model.bias(1)});
    }
    return traj;
}

Eigen::MatrixXd binary_features(const FrameStack& stack, std::uint16_t fx, std::uint16_t fy) {
    if (stack.frames.empty()) return Eigen::MatrixXd(0, 0);
    Frame probe = downsample(stack.frames.front(), fx, fy);
    const std::size_t dim = probe.counts_pos.size();
    Eigen::MatrixXd features(stack.frames.size(), dim);
    for (std::size_t i = 0; i < stack.frames.size(); ++i) {
        BinaryGrid g = binarize(downsample(stack.frames[i], fx, fy));
        for (std::size_t j = 0; j < dim; ++j) {
            features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.cells[j];
        }
    }
    return features;
}

namespace {

std::string format_full(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(path.string() + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

void save_linear_model(const LinearModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "evio-linear,2," << model.weights.cols() << '\n';
    for (int r = 0; r < 2; ++r) {
        out << 'w';
        for (Eigen::Index c = 0; c < model.weights.cols(); ++c) {
            out << ',' << format_full(model.weights(r, c));
        }
        out << '\n';
    }
    out << 'b' << ',' << format_full(model.bias(0)) << ',' << format_full(model.bias(1)) << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

LinearModel load_linear_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
    std::stringstream header(line);
    std::string magic, rows, cols;
    std::getline(header, magic, ',');
    std::getline(header, rows, ',');
    std::getline(header, cols, ',');
    if (magic != "evio-linear" || rows != "2") {
        throw FormatError(path.string() + ": not an evio linear model file");
    }
    const auto dim = static_cast<Eigen::Index>(parse_double(cols, path));

    LinearModel model;
    model.weights = Eigen::MatrixXd::Zero(2, dim);
    for (int r = 0; r < 2; ++r) {
        if (!std::getline(in, line)) throw FormatError(path.string() + ": missing weight row");
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        if (field != "w") throw FormatError(path.string() + ": expected a 'w' row");
        for (Eigen::Index c = 0; c < dim; ++c) {
            if (!std::getline(ss, field, ',')) {
                throw FormatError(path.string() + ": short weight row");
            }
            model.weights(r, c) = parse_double(field, path);
        }
    }
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing bias row");
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    if (field != "b") throw FormatError(path.string() + ": expected a 'b' row");
    for (int c = 0; c < 2; ++c) {
        if (!std::getline(ss, field, ',')) throw FormatError(path.string() + ": short bias row");
        model.bias(c) = parse_double(field, path);
    }
    return model;
}

}  // namespace evio
