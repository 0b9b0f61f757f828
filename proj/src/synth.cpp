#include "bpm/synth.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "bpm/rng.hpp"

namespace bpm {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Target {
    double w, h;
    Eigen::VectorXd embedding;
    std::vector<double> cx, cy;  // per frame, 0-based
};

// Reflect a coordinate into [lo, hi], flipping velocity on each bounce.
void bounce(double& pos, double& vel, double lo, double hi) {
    if (hi <= lo) {
        pos = (lo + hi) / 2.0;
        return;
    }
    while (pos < lo || pos > hi) {
        if (pos < lo) {
            pos = 2.0 * lo - pos;
            vel = -vel;
        } else {
            pos = 2.0 * hi - pos;
            vel = -vel;
        }
    }
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = rng.normal();
    const double n = v.norm();
    if (n == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    return v / n;
}

}  // namespace

SyntheticScene generate(const SyntheticSpec& spec) {
    if (spec.n_targets < 1 || spec.n_frames < 1)
        throw std::invalid_argument("scene needs at least one target and one frame");
    if (spec.embed_dim < 2) throw std::invalid_argument("embedding dimension must be at least 2");
    if (spec.fn_rate < 0.0 || spec.fn_rate > 1.0 || spec.fp_rate < 0.0 || spec.fp_rate > 1.0)
        throw std::invalid_argument("rates must lie in [0, 1]");

    Rng rng(spec.seed);
    std::vector<Target> targets;
    targets.reserve(spec.n_targets);

    for (int i = 0; i < spec.n_targets; ++i) {
        Target t;
        t.w = rng.uniform(18.0, 36.0);
        t.h = rng.uniform(36.0, 72.0);
        t.embedding = random_unit(rng, spec.embed_dim);

        const double lo_x = t.w / 2.0, hi_x = spec.arena_w - t.w / 2.0;
        const double lo_y = t.h / 2.0, hi_y = spec.arena_h - t.h / 2.0;
        double cx = rng.uniform(lo_x, std::max(lo_x, hi_x));
        double cy = rng.uniform(lo_y, std::max(lo_y, hi_y));

        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        const double heading = rng.uniform(0.0, 2.0 * kPi);
        double vx = speed * std::cos(heading);
        double vy = speed * std::sin(heading);

        // Steer onto a colliding course: meet an earlier target where it will
        // be in the middle third of the sequence.
        if (i > 0 && rng.uniform() < spec.crossing_bias) {
            const int partner = rng.uniform_int(0, i - 1);
            const int lo_f = spec.n_frames / 3;
            const int hi_f = std::max(lo_f, 2 * spec.n_frames / 3);
            const int meet = std::max(1, rng.uniform_int(lo_f, hi_f));
            const int at = std::min(meet, spec.n_frames - 1);
            if (at >= 1) {
                vx = (targets[partner].cx[at] - cx) / at;
                vy = (targets[partner].cy[at] - cy) / at;
            }
        }

        t.cx.resize(spec.n_frames);
        t.cy.resize(spec.n_frames);
        for (int f = 0; f < spec.n_frames; ++f) {
            t.cx[f] = cx;
            t.cy[f] = cy;
            cx += vx;
            cy += vy;
            bounce(cx, vx, lo_x, hi_x);
            bounce(cy, vy, lo_y, hi_y);
        }
        targets.push_back(std::move(t));
    }

    SyntheticScene scene;
    for (int f = 0; f < spec.n_frames; ++f) {
        const int frame = f + 1;
        auto& gt = scene.ground_truth[frame];
        auto& dets = scene.detections[frame];
        for (int i = 0; i < spec.n_targets; ++i) {
            const Target& t = targets[i];
            gt.emplace_back(i + 1, BoundingBox{t.cx[f] - t.w / 2.0, t.cy[f] - t.h / 2.0, t.w, t.h});
        }
        for (int i = 0; i < spec.n_targets; ++i) {
            const Target& t = targets[i];
            const bool dropped = rng.uniform() < spec.fn_rate;
            const double jx = rng.normal() * spec.jitter_sigma;
            const double jy = rng.normal() * spec.jitter_sigma;
            const double jw = rng.normal() * spec.jitter_sigma;
            const double jh = rng.normal() * spec.jitter_sigma;
            const double conf = rng.uniform(0.55, 1.0);
            Eigen::VectorXd noise(spec.embed_dim);
            for (int k = 0; k < spec.embed_dim; ++k) noise(k) = rng.normal();
            if (dropped) continue;
            BoundingBox box{t.cx[f] - t.w / 2.0 + jx, t.cy[f] - t.h / 2.0 + jy,
                            std::max(1.0, t.w + jw), std::max(1.0, t.h + jh)};
            const Eigen::VectorXd emb =
                normalized_embedding(t.embedding + spec.embed_noise * noise);
            dets.push_back(make_detection(frame, box, conf, emb,
                                          static_cast<int>(dets.size())));
        }
        for (int i = 0; i < spec.n_targets; ++i) {
            if (rng.uniform() >= spec.fp_rate) continue;
            const double w = rng.uniform(18.0, 36.0);
            const double h = rng.uniform(36.0, 72.0);
            const double cx = rng.uniform(w / 2.0, std::max(w / 2.0, spec.arena_w - w / 2.0));
            const double cy = rng.uniform(h / 2.0, std::max(h / 2.0, spec.arena_h - h / 2.0));
            const double conf = rng.uniform(0.05, 0.55);
            const Eigen::VectorXd emb = random_unit(rng, spec.embed_dim);
            dets.push_back(make_detection(frame, BoundingBox{cx - w / 2.0, cy - h / 2.0, w, h},
                                          conf, emb, static_cast<int>(dets.size())));
        }
    }
    return scene;
}

}  // namespace bpm
