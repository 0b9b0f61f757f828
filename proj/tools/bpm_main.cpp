#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpm/io.hpp"
#include "bpm/metrics.hpp"
#include "bpm/synth.hpp"
#include "bpm/tracker.hpp"
#include "json.hpp"

namespace {

std::string report_text(const bpm::MetricsReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "MOTA       %.4f\n"
                  "MOTP       %.4f\n"
                  "IDF1       %.4f\n"
                  "FP         %ld\n"
                  "FN         %ld\n"
                  "IDS        %ld\n"
                  "MT         %d (%.2f%%)\n"
                  "ML         %d (%.2f%%)\n"
                  "gt_tracks  %d\n"
                  "gt_boxes   %ld\n"
                  "hyp_boxes  %ld\n"
                  "matches    %ld\n",
                  r.mota, r.motp, r.idf1, r.fp, r.fn, r.ids, r.mt, 100.0 * r.mt_ratio,
                  r.ml, 100.0 * r.ml_ratio, r.gt_tracks, r.gt_boxes, r.hyp_boxes, r.matches);
    return buf;
}

nlohmann::json report_json(const bpm::MetricsReport& r) {
    return {{"mota", r.mota},         {"motp", r.motp},         {"idf1", r.idf1},
            {"fp", r.fp},             {"fn", r.fn},             {"ids", r.ids},
            {"mt", r.mt},             {"ml", r.ml},             {"mt_ratio", r.mt_ratio},
            {"ml_ratio", r.ml_ratio}, {"gt_tracks", r.gt_tracks}, {"gt_boxes", r.gt_boxes},
            {"hyp_boxes", r.hyp_boxes}, {"matches", r.matches}};
}

struct AblationMode {
    const char* name;
    bpm::TrackerModes modes;
};

// Ordered ladder: each row enables one more stage.
constexpr AblationMode kLadder[] = {
    {"baseline", {false, false, false}},
    {"bp", {true, false, false}},
    {"bp_filter", {true, false, true}},
    {"bpm", {true, true, true}},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"box-plane matching multi-object tracker"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dense scene");
    bpm::SyntheticSpec spec;
    std::string synth_out;
    std::uint64_t synth_seed = spec.seed;
    synth->add_option("--targets", spec.n_targets, "number of targets")->required();
    synth->add_option("--frames", spec.n_frames, "number of frames")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--arena-w", spec.arena_w, "arena width in pixels");
    synth->add_option("--arena-h", spec.arena_h, "arena height in pixels");
    synth->add_option("--speed-min", spec.speed_min, "minimum speed, pixels/frame");
    synth->add_option("--speed-max", spec.speed_max, "maximum speed, pixels/frame");
    synth->add_option("--fn-rate", spec.fn_rate, "per-box miss probability");
    synth->add_option("--fp-rate", spec.fp_rate, "per-box clutter probability");
    synth->add_option("--jitter", spec.jitter_sigma, "coordinate noise sigma, pixels");
    synth->add_option("--embed-dim", spec.embed_dim, "embedding dimension");
    synth->add_option("--embed-noise", spec.embed_noise, "embedding noise sigma");
    synth->add_option("--crossing", spec.crossing_bias, "crossing-course probability");
    synth->callback([&] {
        spec.seed = synth_seed;
        const bpm::SyntheticScene scene = bpm::generate(spec);
        std::filesystem::create_directories(synth_out);
        const std::string gt = synth_out + "/gt.txt";
        const std::string det = synth_out + "/det.txt";
        const std::string emb = synth_out + "/emb.txt";
        bpm::write_labeled(gt, scene.ground_truth);
        bpm::write_detections(det, scene.detections);
        bpm::write_embeddings(emb, scene.detections);
        std::cout << "wrote " << gt << ", " << det << ", " << emb << "\n";
    });

    // track
    auto* track = app.add_subcommand("track", "associate detections into tracks");
    std::string track_det, track_emb, track_scores, track_cfg, track_out;
    std::optional<std::uint64_t> track_seed;
    track->add_option("--det", track_det, "detection file")->required();
    track->add_option("--emb", track_emb, "embedding sidecar");
    track->add_option("--scores", track_scores, "external score sidecar");
    track->add_option("--config", track_cfg, "tracker config file");
    track->add_option("--out", track_out, "result file")->required();
    track->add_option("--seed", track_seed, "override the config rng seed");
    track->callback([&] {
        auto dets = bpm::read_detections(track_det);
        if (!track_emb.empty())
            bpm::attach_embeddings(dets, bpm::read_embeddings(track_emb));
        bpm::ScoreMap scores;
        if (!track_scores.empty()) scores = bpm::read_scores(track_scores);
        bpm::TrackerConfig cfg =
            track_cfg.empty() ? bpm::TrackerConfig{} : bpm::load_config(track_cfg);
        if (track_seed) cfg.rng_seed = *track_seed;
        const bpm::TrackingResult result =
            bpm::run(dets, cfg, {}, track_scores.empty() ? nullptr : &scores);
        bpm::write_result(track_out, result);
        std::cout << "tracks: " << result.tracks.size() << ", frames: ["
                  << result.frame_range.first << ", " << result.frame_range.second
                  << "], wrote " << track_out << "\n";
    });

    // eval
    auto* eval = app.add_subcommand("eval", "score a result against ground truth");
    std::string eval_gt, eval_result, eval_json;
    double eval_gate = 0.5;
    eval->add_option("--gt", eval_gt, "ground-truth file")->required();
    eval->add_option("--result", eval_result, "tracker result file")->required();
    eval->add_option("--iou-gate", eval_gate, "match gate");
    eval->add_option("--json", eval_json, "also write a JSON report here");
    eval->callback([&] {
        const bpm::MetricsReport rep =
            bpm::evaluate(bpm::read_labeled(eval_gt), bpm::read_labeled(eval_result), eval_gate);
        std::cout << report_text(rep);
        if (!eval_json.empty()) {
            std::ofstream out(eval_json);
            if (!out) throw std::runtime_error(eval_json + ": cannot open for writing");
            out << report_json(rep).dump(2) << "\n";
        }
    });

    // ablate
    auto* ablate = app.add_subcommand("ablate", "run the configuration ladder and compare");
    std::string ab_det, ab_gt, ab_emb, ab_scores, ab_cfg, ab_out;
    std::optional<std::uint64_t> ab_seed;
    double ab_gate = 0.5;
    ablate->add_option("--det", ab_det, "detection file")->required();
    ablate->add_option("--gt", ab_gt, "ground-truth file")->required();
    ablate->add_option("--emb", ab_emb, "embedding sidecar");
    ablate->add_option("--scores", ab_scores, "external score sidecar");
    ablate->add_option("--config", ab_cfg, "tracker config file");
    ablate->add_option("--out", ab_out, "output directory")->required();
    ablate->add_option("--seed", ab_seed, "override the config rng seed");
    ablate->add_option("--iou-gate", ab_gate, "match gate for evaluation");
    ablate->callback([&] {
        auto dets = bpm::read_detections(ab_det);
        if (!ab_emb.empty()) bpm::attach_embeddings(dets, bpm::read_embeddings(ab_emb));
        bpm::ScoreMap scores;
        if (!ab_scores.empty()) scores = bpm::read_scores(ab_scores);
        const bpm::LabeledSequence gt = bpm::read_labeled(ab_gt);
        bpm::TrackerConfig cfg = ab_cfg.empty() ? bpm::TrackerConfig{} : bpm::load_config(ab_cfg);
        if (ab_seed) cfg.rng_seed = *ab_seed;
        std::filesystem::create_directories(ab_out);

        std::vector<std::pair<std::string, bpm::MetricsReport>> rows;
        for (const auto& [name, modes] : kLadder) {
            const bpm::TrackingResult result =
                bpm::run(dets, cfg, modes, ab_scores.empty() ? nullptr : &scores);
            bpm::write_result(ab_out + "/result_" + name + ".txt", result);
            rows.emplace_back(name, bpm::evaluate(gt, bpm::to_labeled(result), ab_gate));
        }
        const std::string table = bpm::ablation_table(rows);
        std::ofstream out(ab_out + "/ablation.txt");
        if (!out) throw std::runtime_error(ab_out + "/ablation.txt: cannot open for writing");
        out << table;
        std::cout << table;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
