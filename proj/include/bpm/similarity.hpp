#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bpm/types.hpp"

namespace bpm {

// Cross similarities S(T_i, D_j) plus the same-side similarities consumed by
// the plane-construction penalty term. Pair matrices are symmetric with zero
// diagonal.
struct SimilarityMatrix {
    Eigen::MatrixXd cross;           // n_t x n_d
    Eigen::MatrixXd tracklet_pair;   // n_t x n_t
    Eigen::MatrixXd detection_pair;  // n_d x n_d
};

// Cosine of two unit vectors. Throws on dimension mismatch.
double appearance_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Constant-velocity extrapolation of center and size from the last two
// non-interpolated entries; a single-entry tracklet predicts its own box.
// Requires frame past the tracklet end and a non-terminated tracklet.
BoundingBox predict_box(const Tracklet& t, int frame);

// IoU between the tracklet's predicted box at d.frame and d.box; in [0,1].
double motion_similarity(const Tracklet& t, const Detection& d);

// S = A + lambda_s * M. The appearance term is 0 when either side lacks an
// embedding, so appearance-free runs share this code path.
double fused_similarity(const Tracklet& t, const Detection& d, double lambda_s);

// Fills all three blocks for one frame step. `frame` is the detections' frame
// (needed for the tracklet-pair predictions even when there are none).
// Preconditions: every detection is at `frame`, every tracklet ends before it.
SimilarityMatrix build_similarity_matrix(const std::vector<Tracklet>& tracklets,
                                         const std::vector<Detection>& detections,
                                         int frame, const TrackerConfig& cfg,
                                         Execution exec = Execution::parallel);

}  // namespace bpm
