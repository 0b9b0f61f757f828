#include "bpm/tracker.hpp"

#include <algorithm>
#include <stdexcept>

#include "bpm/assignment.hpp"
#include "bpm/geometry.hpp"

namespace bpm {

std::pair<std::vector<Detection>, std::vector<DetectionFilterDecision>>
filter_detections(const std::vector<Detection>& dets, const ScoreMap* scores,
                  const TrackerConfig& cfg) {
    std::vector<Detection> kept;
    std::vector<DetectionFilterDecision> decisions;
    decisions.reserve(dets.size());
    for (const auto& d : dets) {
        DetectionFilterDecision dec;
        const ScoreMap::const_iterator it =
            scores ? scores->find({d.frame, d.source_index}) : ScoreMap::const_iterator{};
        if (scores && it != scores->end()) {
            if (it->second < 0.0 || it->second > 1.0)
                throw std::out_of_range("external detection score outside [0, 1]");
            dec.score = it->second;
            dec.reason = FilterReason::external_classifier;
        } else {
            dec.score = d.confidence;
            dec.reason = FilterReason::pass;
        }
        dec.kept = dec.score >= cfg.tau_det;
        if (!dec.kept && dec.reason == FilterReason::pass)
            dec.reason = FilterReason::confidence_floor;
        if (dec.kept) kept.push_back(d);
        decisions.push_back(dec);
    }
    return {std::move(kept), std::move(decisions)};
}

Tracker::Tracker(const TrackerConfig& cfg, const TrackerModes& modes)
    : cfg_(cfg), modes_(modes) {}

void Tracker::apply_match(Tracklet& t, const Detection& d) {
    const int last = t.last_frame();
    const BoundingBox from = t.last().box;
    for (int f = last + 1; f < d.frame; ++f) {
        const double u = static_cast<double>(f - last) / (d.frame - last);
        t.entries.push_back({f, lerp_box(from, d.box, u), true});
    }
    t.entries.push_back({d.frame, d.box, false});
    t.age_since_update = 0;
    t.hits += 1;
    if (t.state == TrackState::tentative && t.hits >= cfg_.n_init)
        t.state = TrackState::confirmed;
    if (d.embedding) {
        if (!t.embedding)
            t.embedding = *d.embedding;
        else
            t.embedding = normalized_embedding(0.9 * *t.embedding + 0.1 * *d.embedding);
    }
}

FrameReport Tracker::step(int frame, const std::vector<Detection>& dets,
                          const ScoreMap* scores) {
    if (frame <= last_frame_)
        throw std::invalid_argument("frames must strictly increase across steps");
    for (const auto& d : dets)
        if (d.frame != frame)
            throw std::invalid_argument("detection carries a different frame than the step");

    FrameReport rep;
    rep.frame = frame;

    TrackerConfig fcfg = cfg_;
    if (!modes_.use_filter) fcfg.tau_det = 0.0;
    auto [kept, decisions] =
        filter_detections(dets, modes_.use_filter ? scores : nullptr, fcfg);
    rep.decisions = std::move(decisions);
    rep.kept = static_cast<int>(kept.size());

    if (!modes_.use_appearance)
        for (auto& d : kept) d.embedding.reset();

    const SimilarityMatrix sm =
        build_similarity_matrix(live_, kept, frame, cfg_, Execution::parallel);

    if (modes_.use_planes) {
        const SolverReport solved = construct_planes(sm, cfg_, Execution::parallel);
        rep.matches = in_plane_match(solved.best, sm, cfg_, Execution::parallel);
        rep.plane_count = solved.best.n_planes;
        rep.plane_objective = solved.best.objective;
    } else {
        rep.matches = km_assign(sm.cross, cfg_.tau_match);
    }

    std::vector<bool> t_matched(live_.size(), false), d_matched(kept.size(), false);
    for (const auto& [ti, dj] : rep.matches.pairs) {
        apply_match(live_[ti], kept[dj]);
        t_matched[ti] = true;
        d_matched[dj] = true;
    }

    std::vector<Tracklet> survivors;
    survivors.reserve(live_.size());
    for (std::size_t ti = 0; ti < live_.size(); ++ti) {
        Tracklet& t = live_[ti];
        if (!t_matched[ti]) {
            t.age_since_update += 1;
            if (t.age_since_update > cfg_.max_age) {
                t.state = TrackState::terminated;
                rep.terminated_ids.push_back(t.id);
                finished_.push_back(std::move(t));
                continue;
            }
        }
        survivors.push_back(std::move(t));
    }
    live_ = std::move(survivors);

    for (std::size_t dj = 0; dj < kept.size(); ++dj) {
        if (d_matched[dj]) continue;
        Tracklet t;
        t.id = next_id_++;
        t.entries.push_back({frame, kept[dj].box, false});
        t.embedding = kept[dj].embedding;
        t.hits = 1;
        t.state = t.hits >= cfg_.n_init ? TrackState::confirmed : TrackState::tentative;
        rep.born_ids.push_back(t.id);
        live_.push_back(std::move(t));
    }

    last_frame_ = frame;
    return rep;
}

std::vector<Tracklet> Tracker::confirmed_tracks() const {
    std::vector<Tracklet> out;
    for (const auto& t : finished_)
        if (t.hits >= cfg_.n_init) out.push_back(t);
    for (const auto& t : live_)
        if (t.hits >= cfg_.n_init) out.push_back(t);
    std::sort(out.begin(), out.end(),
              [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
    return out;
}

TrackingResult run(const std::map<int, std::vector<Detection>>& sequence,
                   const TrackerConfig& cfg, const TrackerModes& modes,
                   const ScoreMap* scores) {
    TrackingResult result;
    if (sequence.empty()) return result;

    const int first = sequence.begin()->first;
    const int last = sequence.rbegin()->first;
    Tracker tracker(cfg, modes);
    const std::vector<Detection> none;
    for (int f = first; f <= last; ++f) {
        auto it = sequence.find(f);
        tracker.step(f, it == sequence.end() ? none : it->second, scores);
    }
    result.tracks = tracker.confirmed_tracks();
    result.frame_range = {first, last};
    return result;
}

}  // namespace bpm
