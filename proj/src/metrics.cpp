#include "bpm/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "bpm/assignment.hpp"

namespace bpm {
namespace {

void check_unique_ids(const std::vector<std::pair<int, BoundingBox>>& boxes,
                      const char* side) {
    std::unordered_set<int> seen;
    for (const auto& [id, box] : boxes)
        if (!seen.insert(id).second)
            throw std::invalid_argument(std::string("duplicate ") + side + " id within a frame");
}

}  // namespace

FrameMatchResult match_frame(const std::vector<std::pair<int, BoundingBox>>& gt,
                             const std::vector<std::pair<int, BoundingBox>>& hyp,
                             std::map<int, int>& correspondence, double iou_gate) {
    check_unique_ids(gt, "ground-truth");
    check_unique_ids(hyp, "hypothesis");

    std::unordered_map<int, int> gt_pos, hyp_pos;
    for (std::size_t k = 0; k < gt.size(); ++k) gt_pos[gt[k].first] = static_cast<int>(k);
    for (std::size_t k = 0; k < hyp.size(); ++k) hyp_pos[hyp[k].first] = static_cast<int>(k);

    std::vector<bool> gt_used(gt.size(), false), hyp_used(hyp.size(), false);
    FrameMatchResult res;

    // Surviving correspondences first, in ground-truth id order.
    for (const auto& [gid, hid] : correspondence) {
        auto gi = gt_pos.find(gid);
        auto hj = hyp_pos.find(hid);
        if (gi == gt_pos.end() || hj == hyp_pos.end()) continue;
        if (gt_used[gi->second] || hyp_used[hj->second]) continue;
        const double overlap = iou(gt[gi->second].second, hyp[hj->second].second);
        if (overlap > iou_gate) {
            gt_used[gi->second] = true;
            hyp_used[hj->second] = true;
            res.matches.emplace_back(gid, hid);
            res.iou_sum += overlap;
        }
    }

    // The remainder by maximum-total-IoU assignment above the gate.
    std::vector<int> free_gt, free_hyp;
    for (std::size_t k = 0; k < gt.size(); ++k)
        if (!gt_used[k]) free_gt.push_back(static_cast<int>(k));
    for (std::size_t k = 0; k < hyp.size(); ++k)
        if (!hyp_used[k]) free_hyp.push_back(static_cast<int>(k));
    if (!free_gt.empty() && !free_hyp.empty()) {
        Eigen::MatrixXd overlaps(free_gt.size(), free_hyp.size());
        for (std::size_t a = 0; a < free_gt.size(); ++a)
            for (std::size_t b = 0; b < free_hyp.size(); ++b)
                overlaps(a, b) = iou(gt[free_gt[a]].second, hyp[free_hyp[b]].second);
        const MatchSet ms = km_assign(overlaps, iou_gate);
        for (const auto& [a, b] : ms.pairs) {
            gt_used[free_gt[a]] = true;
            hyp_used[free_hyp[b]] = true;
            res.matches.emplace_back(gt[free_gt[a]].first, hyp[free_hyp[b]].first);
            res.iou_sum += overlaps(a, b);
        }
    }

    std::sort(res.matches.begin(), res.matches.end());
    for (const auto& [gid, hid] : res.matches) {
        auto prior = correspondence.find(gid);
        if (prior != correspondence.end() && prior->second != hid) res.switches += 1;
        correspondence[gid] = hid;
    }

    res.fn = static_cast<int>(std::count(gt_used.begin(), gt_used.end(), false));
    res.fp = static_cast<int>(std::count(hyp_used.begin(), hyp_used.end(), false));
    return res;
}

MetricsReport evaluate(const LabeledSequence& gt, const LabeledSequence& hyp,
                       double iou_gate, bool keep_per_frame) {
    MetricsReport rep;
    for (const auto& [frame, boxes] : gt) rep.gt_boxes += static_cast<long>(boxes.size());
    for (const auto& [frame, boxes] : hyp) rep.hyp_boxes += static_cast<long>(boxes.size());
    if (rep.gt_boxes == 0) throw std::invalid_argument("ground truth has no boxes");

    std::set<int> frames;
    for (const auto& [frame, boxes] : gt) frames.insert(frame);
    for (const auto& [frame, boxes] : hyp) frames.insert(frame);

    const std::vector<std::pair<int, BoundingBox>> none;
    std::map<int, int> correspondence;
    std::map<int, long> gt_len, gt_covered;
    std::map<std::pair<int, int>, long> overlap_frames;  // (gt id, hyp id)
    std::set<int> gt_ids, hyp_ids;
    double iou_sum = 0.0;
    if (keep_per_frame) rep.per_frame.emplace();

    for (int f : frames) {
        auto git = gt.find(f);
        auto hit = hyp.find(f);
        const auto& gts = git == gt.end() ? none : git->second;
        const auto& hyps = hit == hyp.end() ? none : hit->second;

        for (const auto& [gid, box] : gts) {
            gt_len[gid] += 1;
            gt_ids.insert(gid);
        }
        for (const auto& [hid, box] : hyps) hyp_ids.insert(hid);
        for (const auto& [gid, gbox] : gts)
            for (const auto& [hid, hbox] : hyps)
                if (iou(gbox, hbox) > iou_gate) overlap_frames[{gid, hid}] += 1;

        FrameMatchResult fr = match_frame(gts, hyps, correspondence, iou_gate);
        rep.fp += fr.fp;
        rep.fn += fr.fn;
        rep.ids += fr.switches;
        rep.matches += static_cast<long>(fr.matches.size());
        iou_sum += fr.iou_sum;
        for (const auto& [gid, hid] : fr.matches) gt_covered[gid] += 1;
        if (keep_per_frame) rep.per_frame->push_back(std::move(fr));
    }

    rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.ids) / rep.gt_boxes;
    rep.motp = rep.matches > 0 ? iou_sum / rep.matches : 0.0;

    rep.gt_tracks = static_cast<int>(gt_ids.size());
    for (int gid : gt_ids) {
        const double coverage = static_cast<double>(gt_covered[gid]) / gt_len[gid];
        if (coverage >= 0.8) rep.mt += 1;
        if (coverage <= 0.2) rep.ml += 1;
    }
    if (rep.gt_tracks > 0) {
        rep.mt_ratio = static_cast<double>(rep.mt) / rep.gt_tracks;
        rep.ml_ratio = static_cast<double>(rep.ml) / rep.gt_tracks;
    }

    // Identity metric: one global assignment of hypothesis ids to ground-truth
    // ids maximizing the total count of gated overlapping frames.
    if (!hyp_ids.empty()) {
        std::vector<int> gvec(gt_ids.begin(), gt_ids.end());
        std::vector<int> hvec(hyp_ids.begin(), hyp_ids.end());
        std::unordered_map<int, int> gidx, hidx;
        for (std::size_t k = 0; k < gvec.size(); ++k) gidx[gvec[k]] = static_cast<int>(k);
        for (std::size_t k = 0; k < hvec.size(); ++k) hidx[hvec[k]] = static_cast<int>(k);
        Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(gvec.size(), hvec.size());
        for (const auto& [pair, n] : overlap_frames)
            counts(gidx[pair.first], hidx[pair.second]) = static_cast<double>(n);
        const MatchSet ms = km_assign(counts, 0.0);
        double idtp = 0.0;
        for (const auto& [a, b] : ms.pairs) idtp += counts(a, b);
        rep.idf1 = 2.0 * idtp / static_cast<double>(rep.gt_boxes + rep.hyp_boxes);
    }
    return rep;
}

std::string ablation_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t name_w = 6;
    for (const auto& [name, r] : rows) name_w = std::max(name_w, name.size());

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s    MOTA    IDF1    MOTP    MT    ML      FP      FN    IDS\n",
                  static_cast<int>(name_w), "config");
    out += buf;
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %6.4f  %6.4f  %6.4f  %4d  %4d  %6ld  %6ld  %5ld\n",
                      static_cast<int>(name_w), name.c_str(), r.mota, r.idf1, r.motp, r.mt,
                      r.ml, r.fp, r.fn, r.ids);
        out += buf;
    }
    return out;
}

LabeledSequence to_labeled(const TrackingResult& result) {
    LabeledSequence out;
    for (const auto& t : result.tracks)
        for (const auto& e : t.entries) out[e.frame].emplace_back(t.id, e.box);
    return out;
}

}  // namespace bpm
