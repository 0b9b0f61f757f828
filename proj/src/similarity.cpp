#include "bpm/similarity.hpp"

#include <stdexcept>

namespace bpm {

double appearance_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("embedding dimension mismatch");
    return a.dot(b);
}

BoundingBox predict_box(const Tracklet& t, int frame) {
    if (t.state == TrackState::terminated)
        throw std::invalid_argument("cannot predict from a terminated tracklet");
    if (t.entries.empty())
        throw std::invalid_argument("tracklet has no entries");
    if (frame <= t.last_frame())
        throw std::invalid_argument("prediction frame must be past the tracklet end");

    // Velocity from the last two raw entries; interpolated boxes are skipped
    // so their error does not compound into the prediction.
    const TrackEntry* newest = nullptr;
    const TrackEntry* older = nullptr;
    for (auto it = t.entries.rbegin(); it != t.entries.rend(); ++it) {
        if (it->interpolated) continue;
        if (!newest) {
            newest = &*it;
        } else {
            older = &*it;
            break;
        }
    }
    if (!newest) newest = &t.entries.back();  // all interpolated; use the end
    if (!older) return newest->box;

    const double dt = newest->frame - older->frame;
    const double steps = frame - newest->frame;
    const double vcx = (newest->box.cx() - older->box.cx()) / dt;
    const double vcy = (newest->box.cy() - older->box.cy()) / dt;
    const double vw = (newest->box.w - older->box.w) / dt;
    const double vh = (newest->box.h - older->box.h) / dt;

    BoundingBox out;
    out.w = std::max(1e-9, newest->box.w + vw * steps);
    out.h = std::max(1e-9, newest->box.h + vh * steps);
    out.x = newest->box.cx() + vcx * steps - 0.5 * out.w;
    out.y = newest->box.cy() + vcy * steps - 0.5 * out.h;
    return out;
}

double motion_similarity(const Tracklet& t, const Detection& d) {
    return iou(predict_box(t, d.frame), d.box);
}

double fused_similarity(const Tracklet& t, const Detection& d, double lambda_s) {
    double appearance = 0.0;
    if (t.embedding && d.embedding)
        appearance = appearance_similarity(*t.embedding, *d.embedding);
    return appearance + lambda_s * motion_similarity(t, d);
}

SimilarityMatrix build_similarity_matrix(const std::vector<Tracklet>& tracklets,
                                         const std::vector<Detection>& detections,
                                         int frame, const TrackerConfig& cfg,
                                         Execution exec) {
    const int n_t = static_cast<int>(tracklets.size());
    const int n_d = static_cast<int>(detections.size());

    SimilarityMatrix sm;
    sm.cross = Eigen::MatrixXd::Zero(n_t, n_d);
    sm.tracklet_pair = Eigen::MatrixXd::Zero(n_t, n_t);
    sm.detection_pair = Eigen::MatrixXd::Zero(n_d, n_d);

    // Predictions are shared by the cross block and the tracklet-pair block.
    std::vector<BoundingBox> predicted(n_t);
    for (int i = 0; i < n_t; ++i) predicted[i] = predict_box(tracklets[i], frame);

    const bool parallel = exec == Execution::parallel;
    const double lambda = cfg.lambda_s;

    // Every cell is independent, so the parallel fill is bit-identical to the
    // serial one.
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n_t; ++i) {
        for (int j = 0; j < n_d; ++j) {
            double appearance = 0.0;
            if (tracklets[i].embedding && detections[j].embedding)
                appearance = appearance_similarity(*tracklets[i].embedding,
                                                   *detections[j].embedding);
            sm.cross(i, j) = appearance + lambda * iou(predicted[i], detections[j].box);
        }
    }

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n_t; ++i) {
        for (int k = i + 1; k < n_t; ++k) {
            double appearance = 0.0;
            if (tracklets[i].embedding && tracklets[k].embedding)
                appearance = appearance_similarity(*tracklets[i].embedding,
                                                   *tracklets[k].embedding);
            const double s = appearance + lambda * iou(predicted[i], predicted[k]);
            sm.tracklet_pair(i, k) = s;
            sm.tracklet_pair(k, i) = s;
        }
    }

#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < n_d; ++j) {
        for (int k = j + 1; k < n_d; ++k) {
            double appearance = 0.0;
            if (detections[j].embedding && detections[k].embedding)
                appearance = appearance_similarity(*detections[j].embedding,
                                                   *detections[k].embedding);
            const double s = appearance + lambda * iou(detections[j].box, detections[k].box);
            sm.detection_pair(j, k) = s;
            sm.detection_pair(k, j) = s;
        }
    }

    return sm;
}

}  // namespace bpm
