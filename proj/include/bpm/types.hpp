#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpm/geometry.hpp"

namespace bpm {

// Execution policy for the data-parallel kernels. Both paths are required to
// produce bit-identical results; `serial` is the reference implementation kept
// for testing and benchmarking.
enum class Execution { serial, parallel };

enum class TrackState { tentative, confirmed, terminated };

// Renormalizes to unit length; rejects zero (or non-finite) vectors so bad
// embedding data surfaces at ingestion instead of as silent motion-only mode.
Eigen::VectorXd normalized_embedding(const Eigen::VectorXd& v);

struct Detection {
    int frame = 1;  // 1-based frame number
    BoundingBox box;
    double confidence = 1.0;  // in [0, 1]
    std::optional<Eigen::VectorXd> embedding;  // unit norm when present
    int source_index = 0;  // position within the frame's raw detection list
};

// Validating factory; normalizes the embedding and checks the field ranges.
Detection make_detection(int frame, const BoundingBox& box, double confidence,
                         std::optional<Eigen::VectorXd> embedding = std::nullopt,
                         int source_index = 0);

struct TrackEntry {
    int frame = 0;
    BoundingBox box;
    bool interpolated = false;
};

struct Tracklet {
    int id = 1;
    std::vector<TrackEntry> entries;  // strictly increasing frames
    std::optional<Eigen::VectorXd> embedding;  // EMA of matched detection embeddings
    int age_since_update = 0;
    TrackState state = TrackState::tentative;
    int hits = 1;

    const TrackEntry& last() const { return entries.back(); }
    int last_frame() const { return entries.back().frame; }
};

// Membership structure of the box-plane construction: which plane (if any)
// each tracklet end and each detection is connected to. -1 means unassigned.
// The one-plane-per-entity constraint is structural in this representation.
struct PlaneAssignment {
    int n_planes = 0;
    std::vector<int> tracklet_plane;
    std::vector<int> detection_plane;
    double objective = 0.0;
};

// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate_assignment(const PlaneAssignment& pa,
                                             int n_tracklets, int n_detections);

// One-to-one tracklet/detection pairing produced by in-plane matching.
struct MatchSet {
    std::vector<std::pair<int, int>> pairs;  // (tracklet index, detection index)
    double total_similarity = 0.0;
};

struct TrackerConfig {
    double lambda_s = 1.0;      // motion weight in the fused similarity
    double tau_match = 0.3;     // minimum similarity for a link
    double tau_det = 0.4;       // detection-filter confidence floor
    int max_age = 30;           // misses before a tracklet is terminated
    int n_init = 3;             // hits before a tracklet is confirmed
    int solver_restarts = 8;
    int solver_max_iters = 200;
    std::uint64_t rng_seed = 1;
};

}  // namespace bpm
