#include "bpm/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bpm/rng.hpp"

namespace bpm {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_map(const FeatureMap& f) {
    if (f.channels < 1 || f.width < 1 || f.height < 1)
        throw std::invalid_argument("feature map dimensions must be positive");
    if (f.data.size() != static_cast<std::size_t>(f.channels) * f.width * f.height)
        throw std::invalid_argument("feature map storage does not match dimensions");
}

}  // namespace

EnsembleWeights EnsembleWeights::make(double w1, double w2, double w3) {
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0)
        throw std::invalid_argument("ensemble weights must be non-negative");
    const double sum = w1 + w2 + w3;
    if (!(sum > 0.0)) throw std::invalid_argument("ensemble weights must not all be zero");
    EnsembleWeights ew;
    ew.w = {w1 / sum, w2 / sum, w3 / sum};
    return ew;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax needs at least one logit");
    for (double x : logits)
        if (!std::isfinite(x)) throw std::invalid_argument("softmax logits must be finite");
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

std::vector<double> ladm_aggregate(const std::vector<double>& p1, const std::vector<double>& p2,
                                   const std::vector<double>& p3, const EnsembleWeights& ew) {
    if (p1.empty() || p1.size() != p2.size() || p1.size() != p3.size())
        throw std::invalid_argument("classifier outputs must share a non-empty length");
    std::vector<double> out(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        out[i] = ew.w[0] * p1[i] + ew.w[1] * p2[i] + ew.w[2] * p3[i];
    return out;
}

SpatialAttentionParams SpatialAttentionParams::zeros(int channels) {
    if (channels < 1) throw std::invalid_argument("channel count must be positive");
    SpatialAttentionParams p;
    p.channels = channels;
    p.conv3x3.assign(static_cast<std::size_t>(channels) * channels * 9, 0.0);
    p.conv3x3_bias.assign(channels, 0.0);
    p.pointwise.assign(channels, 0.0);
    return p;
}

SpatialAttentionParams SpatialAttentionParams::seeded(int channels, std::uint64_t seed) {
    SpatialAttentionParams p = zeros(channels);
    Rng rng(seed);
    for (double& w : p.conv3x3) w = rng.uniform(-0.1, 0.1);
    for (double& b : p.conv3x3_bias) b = rng.uniform(-0.1, 0.1);
    for (double& w : p.pointwise) w = rng.uniform(-0.1, 0.1);
    p.pointwise_bias = rng.uniform(-0.1, 0.1);
    return p;
}

ChannelAttentionParams ChannelAttentionParams::zeros(int channels) {
    if (channels < 1) throw std::invalid_argument("channel count must be positive");
    ChannelAttentionParams p;
    p.fc = Eigen::MatrixXd::Zero(channels, channels);
    p.bias = Eigen::VectorXd::Zero(channels);
    return p;
}

ChannelAttentionParams ChannelAttentionParams::seeded(int channels, std::uint64_t seed) {
    ChannelAttentionParams p = zeros(channels);
    Rng rng(seed);
    for (int r = 0; r < channels; ++r)
        for (int c = 0; c < channels; ++c) p.fc(r, c) = rng.uniform(-0.1, 0.1);
    for (int r = 0; r < channels; ++r) p.bias(r) = rng.uniform(-0.1, 0.1);
    return p;
}

FeatureMap spatial_attention_map(const FeatureMap& f, const SpatialAttentionParams& p,
                                 Execution exec) {
    check_map(f);
    const int C = f.channels, W = f.width, H = f.height;
    if (p.channels != C) throw std::invalid_argument("attention parameters expect a different channel count");
    if (p.conv3x3.size() != static_cast<std::size_t>(C) * C * 9 ||
        p.conv3x3_bias.size() != static_cast<std::size_t>(C) ||
        p.pointwise.size() != static_cast<std::size_t>(C))
        throw std::invalid_argument("attention parameter storage does not match channel count");

    FeatureMap out(1, W, H);
    const bool parallel = exec == Execution::parallel;
    // Each output pixel is independent and sums its terms in a fixed order, so
    // the parallel result matches the serial one bit for bit.
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int w = 0; w < W; ++w) {
        for (int h = 0; h < H; ++h) {
            double pixel = p.pointwise_bias;
            for (int co = 0; co < C; ++co) {
                double acc = p.conv3x3_bias[co];
                for (int ci = 0; ci < C; ++ci)
                    for (int kx = 0; kx < 3; ++kx)
                        for (int ky = 0; ky < 3; ++ky) {
                            const int sw = w + kx - 1;
                            const int sh = h + ky - 1;
                            if (sw < 0 || sw >= W || sh < 0 || sh >= H) continue;
                            acc += p.conv3x3[p.kernel_index(co, ci, kx, ky)] * f.at(ci, sw, sh);
                        }
                pixel += p.pointwise[co] * acc;
            }
            out.at(0, w, h) = sigmoid(pixel);
        }
    }
    return out;
}

FeatureMap channel_attention_map(const FeatureMap& f, const ChannelAttentionParams& p) {
    check_map(f);
    const int C = f.channels;
    if (p.fc.rows() != C || p.fc.cols() != C || p.bias.size() != C)
        throw std::invalid_argument("attention parameters expect a different channel count");

    Eigen::VectorXd pooled(C);
    const double inv_area = 1.0 / (static_cast<double>(f.width) * f.height);
    for (int c = 0; c < C; ++c) {
        double sum = 0.0;
        for (int w = 0; w < f.width; ++w)
            for (int h = 0; h < f.height; ++h) sum += f.at(c, w, h);
        pooled(c) = sum * inv_area;
    }
    const Eigen::VectorXd y = p.fc * pooled + p.bias;
    FeatureMap out(C, 1, 1);
    for (int c = 0; c < C; ++c) out.at(c, 0, 0) = sigmoid(y(c));
    return out;
}

FeatureMap gam_apply(const FeatureMap& f, const FeatureMap& sam, const FeatureMap& cam) {
    check_map(f);
    check_map(sam);
    check_map(cam);
    if (sam.channels != 1 || sam.width != f.width || sam.height != f.height)
        throw std::invalid_argument("spatial map must be 1 x W x H matching the input");
    if (cam.width != 1 || cam.height != 1 || cam.channels != f.channels)
        throw std::invalid_argument("channel map must be C x 1 x 1 matching the input");

    FeatureMap out(f.channels, f.width, f.height);
    for (int c = 0; c < f.channels; ++c) {
        const double gain = cam.at(c, 0, 0);
        for (int w = 0; w < f.width; ++w)
            for (int h = 0; h < f.height; ++h)
                out.at(c, w, h) = f.at(c, w, h) * sam.at(0, w, h) * gain;
    }
    return out;
}

}  // namespace bpm
