#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bpm/boxplane.hpp"
#include "bpm/similarity.hpp"
#include "bpm/types.hpp"

namespace bpm {

enum class FilterReason { confidence_floor, external_classifier, pass };

struct DetectionFilterDecision {
    bool kept = true;
    double score = 1.0;
    FilterReason reason = FilterReason::pass;
};

// External per-detection classifier scores, keyed by (frame, source_index).
// Stands in for a trained detection-vs-clutter model at inference time.
using ScoreMap = std::map<std::pair<int, int>, double>;

// Score = external score when present, else the detection's own confidence;
// kept iff score >= cfg.tau_det. Order preserved. Throws if an external score
// is outside [0, 1].
std::pair<std::vector<Detection>, std::vector<DetectionFilterDecision>>
filter_detections(const std::vector<Detection>& dets, const ScoreMap* scores,
                  const TrackerConfig& cfg);

// Ablation switches. All on = the full pipeline; planes off falls back to one
// global assignment over the cross similarities; appearance off ignores
// embeddings; filter off keeps every detection.
struct TrackerModes {
    bool use_planes = true;
    bool use_appearance = true;
    bool use_filter = true;
};

struct FrameReport {
    int frame = 0;
    std::vector<DetectionFilterDecision> decisions;
    int kept = 0;
    MatchSet matches;  // indices into (live tracklets, kept detections)
    std::vector<int> born_ids;
    std::vector<int> terminated_ids;
    int plane_count = 0;
    double plane_objective = 0.0;
};

struct TrackingResult {
    std::vector<Tracklet> tracks;          // ever-confirmed only, sorted by id
    std::pair<int, int> frame_range{0, 0};
};

// Frame-by-frame tracking state machine. Frames must strictly increase.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg, const TrackerModes& modes = {});

    FrameReport step(int frame, const std::vector<Detection>& dets,
                     const ScoreMap* scores = nullptr);

    // Tracklets that ever reached confirmed, live and terminated alike.
    std::vector<Tracklet> confirmed_tracks() const;

    const std::vector<Tracklet>& live() const { return live_; }
    int last_frame() const { return last_frame_; }

private:
    TrackerConfig cfg_;
    TrackerModes modes_;
    std::vector<Tracklet> live_;
    std::vector<Tracklet> finished_;
    int next_id_ = 1;
    int last_frame_ = 0;

    void apply_match(Tracklet& t, const Detection& d);
};

// Runs the tracker over every frame in [first, last] of the sequence (frames
// absent from the map step with no detections, so gaps age tracklets).
TrackingResult run(const std::map<int, std::vector<Detection>>& sequence,
                   const TrackerConfig& cfg, const TrackerModes& modes = {},
                   const ScoreMap* scores = nullptr);

}  // namespace bpm
