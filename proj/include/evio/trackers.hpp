#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "evio/events.hpp"
#include "evio/representation.hpp"

namespace evio {

// ---------------------------------------------------------------------------
// centroid baseline
// ---------------------------------------------------------------------------

/// Non-learned tracker: an exponentially decayed per-pixel activity map
/// (half-life `decay` frames, both polarities summed) whose weighted
/// centroid is the prediction. Frames whose total activity falls below
/// min_events repeat the previous prediction (frame center for frame 0).
Trajectory centroid_track(const FrameStack& stack, double decay, double min_events);

// ---------------------------------------------------------------------------
// bidirectional relative positional attention
// ---------------------------------------------------------------------------

/// Shape and slope parameters for the attention block. Slopes must be
/// strictly decreasing across heads and all negative.
struct AttentionConfig {
    std::size_t seq_len = 1;   // T
    std::size_t heads = 1;     // h
    std::size_t key_dim = 1;   // d_k
    std::vector<double> slopes;
};

/// The default head sensitivity schedule: m_i = -(i+1)/h.
std::vector<double> default_slopes(std::size_t heads);

void validate(const AttentionConfig& cfg);

/// Per-head relative position bias, split into its causal halves:
///   forward[t][s]  = m * (t - s) for t >= s, else 0
///   backward[t][s] = m * (s - t) for t < s,  else 0
///   combined       = forward + backward
struct BiasMatrices {
    Eigen::MatrixXd forward;
    Eigen::MatrixXd backward;
    Eigen::MatrixXd combined;
};

/// Builds the T x T bias matrices for every head in cfg.
std::vector<BiasMatrices> build_bias(const AttentionConfig& cfg);

/// Numerically stable row-wise softmax.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

/// One attention head: softmax(Q K^T / sqrt(d_k) + bias) V.
/// Q, K are T x d_k, V is T x d_v, bias is T x T (ArgumentError otherwise).
Eigen::MatrixXd attention_head(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k,
                               const Eigen::MatrixXd& v, const Eigen::MatrixXd& bias);

/// All heads with their cfg-derived bias matrices; returns one T x d_v
/// output per head.
std::vector<Eigen::MatrixXd> bidirectional_attention(std::span<const Eigen::MatrixXd> q,
                                            std::span<const Eigen::MatrixXd> k,
                                            std::span<const Eigen::MatrixXd> v,
                                            const AttentionConfig& cfg);

// ---------------------------------------------------------------------------
// linear readout and its training loss
// ---------------------------------------------------------------------------

/// sqrt(sum_t ||pred_t - label_t||^2) / T. Zero length raises ArgumentError.
double rmse_time_loss(std::span<const Vec2> pred, std::span<const Vec2> label);

/// Affine map from a flattened binary feature vector to (x, y).
struct LinearModel {
    Eigen::Matrix<double, 2, Eigen::Dynamic> weights;
    Eigen::Vector2d bias{0.0, 0.0};

    std::size_t feature_dim() const { return static_cast<std::size_t>(weights.cols()); }
};

struct TrainStats {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::size_t skipped_steps = 0;  // zero-residual epochs where no update ran
};

/// Loss and analytic gradient of rmse_time_loss through the model at the
/// given features (N x D) and labels. Returns {loss, dW, db}; the gradient
/// is zero at the (already optimal) zero-residual singularity.
struct LossGrad {
    double loss = 0.0;
    Eigen::Matrix<double, 2, Eigen::Dynamic> d_weights;
    Eigen::Vector2d d_bias;
    bool singular = false;
};
LossGrad linear_loss_gradient(const LinearModel& model, const Eigen::MatrixXd& features,
                              const std::vector<Vec2>& targets);

/// Full-batch gradient descent on rmse_time_loss. Weights start at zero,
/// the bias at the label centroid; zero-residual epochs skip their update
/// and are counted in stats. The seed parameter is reserved (the
/// initialization is deterministic) and kept for interface stability.
LinearModel train_linear(const Eigen::MatrixXd& features, const LabelTrack& track, double lr,
                         std::size_t epochs, std::uint64_t seed, TrainStats* stats = nullptr);

/// Applies the affine map per frame. Dimension mismatch raises ArgumentError.
Trajectory predict_linear(const LinearModel& model, const Eigen::MatrixXd& features);

/// Feature matrix for the linear tracker: each frame downsampled by
/// (fx, fy), binarized and flattened to a row.
Eigen::MatrixXd binary_features(const FrameStack& stack, std::uint16_t fx, std::uint16_t fy);

/// Model CSV: header line `evio-linear,2,D`, two `w,...` rows, one `b,...` row.
void save_linear_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_linear_model(const std::filesystem::path& path);

}  // namespace evio
