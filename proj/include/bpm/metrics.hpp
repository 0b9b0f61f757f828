#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpm/geometry.hpp"
#include "bpm/tracker.hpp"

namespace bpm {

// frame -> list of (id, box); used for both ground truth and hypotheses.
using LabeledSequence = std::map<int, std::vector<std::pair<int, BoundingBox>>>;

struct FrameMatchResult {
    std::vector<std::pair<int, int>> matches;  // (gt id, hyp id)
    int fp = 0;
    int fn = 0;
    int switches = 0;
    double iou_sum = 0.0;
};

// One CLEAR-style frame step. `correspondence` (gt id -> hyp id, last known)
// is consulted first: surviving pairs above the gate take precedence over
// globally better new pairs; the remainder is matched by maximum-total-IoU
// assignment above the gate. A gt id matched to a different hyp id than its
// previous correspondence counts one switch. Throws on duplicate ids within
// either list.
FrameMatchResult match_frame(const std::vector<std::pair<int, BoundingBox>>& gt,
                             const std::vector<std::pair<int, BoundingBox>>& hyp,
                             std::map<int, int>& correspondence, double iou_gate);

struct MetricsReport {
    double mota = 0.0;
    double motp = 0.0;  // mean IoU over matches
    double idf1 = 0.0;
    long fp = 0;
    long fn = 0;
    long ids = 0;
    int mt = 0;
    int ml = 0;
    int gt_tracks = 0;
    double mt_ratio = 0.0;
    double ml_ratio = 0.0;
    long gt_boxes = 0;
    long hyp_boxes = 0;
    long matches = 0;
    std::optional<std::vector<FrameMatchResult>> per_frame;
};

// Full-sequence evaluation: MOTA, MOTP (overlap convention), IDF1 via a
// global identity assignment over per-frame gated overlaps, MT/ML at the
// 80%/20% coverage thresholds. Throws when the ground truth has no boxes.
MetricsReport evaluate(const LabeledSequence& gt, const LabeledSequence& hyp,
                       double iou_gate = 0.5, bool keep_per_frame = false);

// Fixed-width comparison table, one row per named configuration.
std::string ablation_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

// View of a tracking result in evaluation form.
LabeledSequence to_labeled(const TrackingResult& result);

}  // namespace bpm
