#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "bpm/boxplane.hpp"
#include "bpm/neural.hpp"
#include "bpm/rng.hpp"
#include "bpm/similarity.hpp"
#include "bpm/types.hpp"

using namespace bpm;

namespace {

Eigen::VectorXd unit_vec(Rng& rng, int dim) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = rng.normal();
    return normalized_embedding(v);
}

// n live tracklets with two raw entries each and n detections one frame later.
std::pair<std::vector<Tracklet>, std::vector<Detection>> make_scene(int n) {
    Rng rng(7);
    std::vector<Tracklet> ts;
    std::vector<Detection> ds;
    for (int k = 0; k < n; ++k) {
        const double x = rng.uniform(0.0, 600.0);
        const double y = rng.uniform(0.0, 400.0);
        Tracklet t;
        t.id = k + 1;
        t.entries.push_back({1, {x, y, 20.0, 40.0}, false});
        t.entries.push_back({2, {x + 2.0, y + 1.0, 20.0, 40.0}, false});
        t.embedding = unit_vec(rng, 16);
        t.hits = 3;
        t.state = TrackState::confirmed;
        ts.push_back(std::move(t));
        ds.push_back(make_detection(3, {x + 4.0, y + 2.0, 20.0, 40.0}, 0.9,
                                    unit_vec(rng, 16), k));
    }
    return {ts, ds};
}

SimilarityMatrix scene_matrix(int n) {
    const auto [ts, ds] = make_scene(n);
    return build_similarity_matrix(ts, ds, 3, TrackerConfig{}, Execution::serial);
}

void bench_similarity(benchmark::State& state, Execution exec) {
    const auto [ts, ds] = make_scene(static_cast<int>(state.range(0)));
    const TrackerConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_similarity_matrix(ts, ds, 3, cfg, exec));
}

void bench_planes(benchmark::State& state, Execution exec) {
    const SimilarityMatrix sm = scene_matrix(static_cast<int>(state.range(0)));
    TrackerConfig cfg;
    cfg.solver_restarts = 8;
    for (auto _ : state) benchmark::DoNotOptimize(construct_planes(sm, cfg, exec));
}

void bench_in_plane(benchmark::State& state, Execution exec) {
    const int n = static_cast<int>(state.range(0));
    const SimilarityMatrix sm = scene_matrix(n);
    PlaneAssignment pa;  // planes of four tracklets and four detections each
    pa.n_planes = (n + 3) / 4;
    for (int k = 0; k < n; ++k) {
        pa.tracklet_plane.push_back(k / 4);
        pa.detection_plane.push_back(k / 4);
    }
    const TrackerConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(in_plane_match(pa, sm, cfg, exec));
}

void bench_attention(benchmark::State& state, Execution exec) {
    const int C = 8, WH = static_cast<int>(state.range(0));
    FeatureMap f(C, WH, WH);
    Rng rng(11);
    for (double& x : f.data) x = rng.normal();
    const SpatialAttentionParams p = SpatialAttentionParams::seeded(C, 13);
    for (auto _ : state) benchmark::DoNotOptimize(spatial_attention_map(f, p, exec));
}

}  // namespace

BENCHMARK_CAPTURE(bench_similarity, serial, Execution::serial)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(bench_similarity, parallel, Execution::parallel)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(bench_planes, serial, Execution::serial)->Arg(16)->Arg(48);
BENCHMARK_CAPTURE(bench_planes, parallel, Execution::parallel)->Arg(16)->Arg(48);
BENCHMARK_CAPTURE(bench_in_plane, serial, Execution::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(bench_in_plane, parallel, Execution::parallel)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(bench_attention, serial, Execution::serial)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(bench_attention, parallel, Execution::parallel)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
