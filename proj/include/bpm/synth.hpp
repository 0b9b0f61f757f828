#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bpm/metrics.hpp"
#include "bpm/types.hpp"

namespace bpm {

// Dense-scene generator spec. Targets follow constant-velocity paths with
// wall reflection; crossing_bias is the probability that a target is steered
// onto a colliding course with an earlier one. Output is deterministic per
// seed.
struct SyntheticSpec {
    int n_targets = 1;
    int n_frames = 1;
    double arena_w = 640.0;
    double arena_h = 480.0;
    double speed_min = 1.0;
    double speed_max = 4.0;
    double fn_rate = 0.0;
    double fp_rate = 0.0;
    double jitter_sigma = 0.0;  // pixels
    int embed_dim = 8;
    double embed_noise = 0.0;
    double crossing_bias = 0.0;
    std::uint64_t seed = 1;
};

struct SyntheticScene {
    LabeledSequence ground_truth;
    std::map<int, std::vector<Detection>> detections;  // embeddings attached
};

// Detections are the ground-truth boxes minus false-negative draws, plus
// clutter boxes, plus coordinate jitter. True detections score confidence in
// [0.55, 1), clutter in [0.05, 0.55), so the default filter floor separates
// them. Each id carries a fixed random unit embedding; detection embeddings
// add Gaussian noise and renormalize; clutter embeddings are random.
SyntheticScene generate(const SyntheticSpec& spec);

}  // namespace bpm
