#include "bpm/types.hpp"

#include <cmath>
#include <stdexcept>

namespace bpm {

Eigen::VectorXd normalized_embedding(const Eigen::VectorXd& v) {
    if (v.size() == 0) throw std::invalid_argument("embedding is empty");
    if (!v.allFinite()) throw std::invalid_argument("embedding has non-finite values");
    const double norm = v.norm();
    if (norm <= 0.0) throw std::invalid_argument("embedding has zero norm");
    return v / norm;
}

Detection make_detection(int frame, const BoundingBox& box, double confidence,
                         std::optional<Eigen::VectorXd> embedding, int source_index) {
    if (frame < 1) throw std::invalid_argument("detection frame must be >= 1");
    if (!box.valid()) throw std::invalid_argument("detection box is degenerate");
    if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0)
        throw std::invalid_argument("detection confidence outside [0, 1]");
    Detection d;
    d.frame = frame;
    d.box = box;
    d.confidence = confidence;
    if (embedding) d.embedding = normalized_embedding(*embedding);
    d.source_index = source_index;
    return d;
}

std::vector<std::string> validate_assignment(const PlaneAssignment& pa,
                                             int n_tracklets, int n_detections) {
    std::vector<std::string> violations;
    auto note = [&](const std::string& msg) { violations.push_back(msg); };

    if (pa.n_planes < 0) note("negative plane count");
    if (static_cast<int>(pa.tracklet_plane.size()) != n_tracklets)
        note("tracklet map size " + std::to_string(pa.tracklet_plane.size()) +
             " != n_t " + std::to_string(n_tracklets));
    if (static_cast<int>(pa.detection_plane.size()) != n_detections)
        note("detection map size " + std::to_string(pa.detection_plane.size()) +
             " != n_d " + std::to_string(n_detections));

    std::vector<int> members(std::max(pa.n_planes, 0), 0);
    auto check_side = [&](const std::vector<int>& side, const char* name) {
        for (std::size_t k = 0; k < side.size(); ++k) {
            const int p = side[k];
            if (p == -1) continue;
            if (p < 0 || p >= pa.n_planes) {
                note(std::string(name) + " " + std::to_string(k) +
                     ": plane index " + std::to_string(p) + " out of range");
            } else {
                ++members[p];
            }
        }
    };
    check_side(pa.tracklet_plane, "tracklet");
    check_side(pa.detection_plane, "detection");

    for (int p = 0; p < pa.n_planes; ++p)
        if (members[p] == 0) note("empty plane " + std::to_string(p));

    if (!std::isfinite(pa.objective)) note("non-finite objective");
    return violations;
}

}  // namespace bpm
