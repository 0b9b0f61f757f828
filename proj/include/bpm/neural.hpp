#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "bpm/types.hpp"

namespace bpm {

// Dense C x W x H tensor, channel-major.
struct FeatureMap {
    int channels = 1;
    int width = 1;
    int height = 1;
    std::vector<double> data;

    FeatureMap() : data(1, 0.0) {}
    FeatureMap(int c, int w, int h)
        : channels(c), width(w), height(h),
          data(static_cast<std::size_t>(c) * w * h, 0.0) {}

    std::size_t index(int c, int w, int h) const {
        return (static_cast<std::size_t>(c) * width + w) * height + h;
    }
    double& at(int c, int w, int h) { return data[index(c, w, h)]; }
    double at(int c, int w, int h) const { return data[index(c, w, h)]; }
};

// Convex combination weights for the three-classifier aggregation; normalized
// at construction so the output stays a probability vector.
struct EnsembleWeights {
    std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    static EnsembleWeights make(double w1, double w2, double w3);
};

// Standard max-subtracted softmax; sums to 1 within 1e-12. Throws on empty.
std::vector<double> softmax(const std::vector<double>& logits);

// Weighted average of three probability vectors of equal length.
std::vector<double> ladm_aggregate(const std::vector<double>& p1,
                                   const std::vector<double>& p2,
                                   const std::vector<double>& p3,
                                   const EnsembleWeights& ew);

// 3x3 same-channel convolution (zero padding 1, stride 1) followed by a
// point-wise convolution down to one channel, then sigmoid.
struct SpatialAttentionParams {
    int channels = 1;
    std::vector<double> conv3x3;       // [c_out][c_in][3][3]
    std::vector<double> conv3x3_bias;  // [c_out]
    std::vector<double> pointwise;     // [c_in]
    double pointwise_bias = 0.0;

    std::size_t kernel_index(int co, int ci, int kx, int ky) const {
        return ((static_cast<std::size_t>(co) * channels + ci) * 3 + kx) * 3 + ky;
    }
    // All-zero weights and biases for the given channel count.
    static SpatialAttentionParams zeros(int channels);
    // Deterministic uniform [-0.1, 0.1] draws; weights are never trained.
    static SpatialAttentionParams seeded(int channels, std::uint64_t seed);
};

// Global average pooling, square fully connected layer, sigmoid.
struct ChannelAttentionParams {
    Eigen::MatrixXd fc;    // C x C
    Eigen::VectorXd bias;  // C

    static ChannelAttentionParams zeros(int channels);
    static ChannelAttentionParams seeded(int channels, std::uint64_t seed);
};

// Returns 1 x W x H, all values in (0,1).
FeatureMap spatial_attention_map(const FeatureMap& f, const SpatialAttentionParams& p,
                                 Execution exec = Execution::parallel);

// Returns C x 1 x 1, all values in (0,1).
FeatureMap channel_attention_map(const FeatureMap& f, const ChannelAttentionParams& p);

// out[c][w][h] = f[c][w][h] * sam[0][w][h] * cam[c][0][0].
FeatureMap gam_apply(const FeatureMap& f, const FeatureMap& sam, const FeatureMap& cam);

}  // namespace bpm
