#include "bpm/boxplane.hpp"

#include <algorithm>
#include <stdexcept>

#include "bpm/rng.hpp"

namespace bpm {
namespace {

// Membership lists of one candidate structure during search/enumeration.
struct Planes {
    std::vector<int> t_plane, d_plane;  // -1 = unassigned
    std::vector<std::vector<int>> plane_tracklets;
    std::vector<std::vector<int>> plane_detections;

    int count() const { return static_cast<int>(plane_tracklets.size()); }

    void reset(int n_t, int n_d) {
        t_plane.assign(n_t, -1);
        d_plane.assign(n_d, -1);
        plane_tracklets.clear();
        plane_detections.clear();
    }

    void place_tracklet(int i, int p) {
        while (count() <= p) {
            plane_tracklets.emplace_back();
            plane_detections.emplace_back();
        }
        t_plane[i] = p;
        plane_tracklets[p].push_back(i);
    }

    void place_detection(int j, int p) {
        while (count() <= p) {
            plane_tracklets.emplace_back();
            plane_detections.emplace_back();
        }
        d_plane[j] = p;
        plane_detections[p].push_back(j);
    }

    void remove_tracklet(int i) {
        const int p = t_plane[i];
        if (p < 0) return;
        auto& v = plane_tracklets[p];
        v.erase(std::find(v.begin(), v.end(), i));
        t_plane[i] = -1;
        drop_if_empty(p);
    }

    void remove_detection(int j) {
        const int p = d_plane[j];
        if (p < 0) return;
        auto& v = plane_detections[p];
        v.erase(std::find(v.begin(), v.end(), j));
        d_plane[j] = -1;
        drop_if_empty(p);
    }

    void drop_if_empty(int p) {
        if (!plane_tracklets[p].empty() || !plane_detections[p].empty()) return;
        plane_tracklets.erase(plane_tracklets.begin() + p);
        plane_detections.erase(plane_detections.begin() + p);
        for (auto& x : t_plane)
            if (x > p) --x;
        for (auto& x : d_plane)
            if (x > p) --x;
    }

    // Relabels planes by first appearance (tracklets scanned first) so equal
    // structures always produce the identical assignment.
    PlaneAssignment to_assignment() const {
        PlaneAssignment pa;
        const int np = count();
        std::vector<int> relabel(np, -1);
        int next = 0;
        auto visit = [&](int p) {
            if (p >= 0 && relabel[p] < 0) relabel[p] = next++;
        };
        for (int p : t_plane) visit(p);
        for (int p : d_plane) visit(p);
        pa.n_planes = next;
        pa.tracklet_plane.resize(t_plane.size());
        pa.detection_plane.resize(d_plane.size());
        for (std::size_t i = 0; i < t_plane.size(); ++i)
            pa.tracklet_plane[i] = t_plane[i] < 0 ? -1 : relabel[t_plane[i]];
        for (std::size_t j = 0; j < d_plane.size(); ++j)
            pa.detection_plane[j] = d_plane[j] < 0 ? -1 : relabel[d_plane[j]];
        return pa;
    }
};

void check_dims(const PlaneAssignment& pa, const SimilarityMatrix& sm) {
    if (static_cast<int>(pa.tracklet_plane.size()) != sm.cross.rows() ||
        static_cast<int>(pa.detection_plane.size()) != sm.cross.cols())
        throw std::invalid_argument("assignment does not match similarity dimensions");
}

std::vector<std::vector<int>> members_per_plane(const std::vector<int>& side, int n_planes) {
    std::vector<std::vector<int>> out(n_planes);
    for (std::size_t k = 0; k < side.size(); ++k)
        if (side[k] >= 0) out[side[k]].push_back(static_cast<int>(k));
    return out;
}

}  // namespace

double phi1(const PlaneAssignment& pa, const SimilarityMatrix& sm) {
    check_dims(pa, sm);
    const auto ts = members_per_plane(pa.tracklet_plane, pa.n_planes);
    const auto ds = members_per_plane(pa.detection_plane, pa.n_planes);
    double total = 0.0;
    for (int p = 0; p < pa.n_planes; ++p)
        for (int i : ts[p])
            for (int j : ds[p]) total -= 2.0 * sm.cross(i, j);
    return total;
}

double phi2(const PlaneAssignment& pa, const SimilarityMatrix& sm) {
    check_dims(pa, sm);
    const auto ts = members_per_plane(pa.tracklet_plane, pa.n_planes);
    const auto ds = members_per_plane(pa.detection_plane, pa.n_planes);
    double total = 0.0;
    // Ordered pairs: each unordered same-side pair enters twice.
    for (int p = 0; p < pa.n_planes; ++p) {
        for (int a : ts[p])
            for (int b : ts[p])
                if (a != b) total += sm.tracklet_pair(a, b);
        for (int a : ds[p])
            for (int b : ds[p])
                if (a != b) total += sm.detection_pair(a, b);
    }
    return total;
}

ObjectiveTerms evaluate(const PlaneAssignment& pa, const SimilarityMatrix& sm) {
    ObjectiveTerms terms;
    terms.phi1 = phi1(pa, sm);
    terms.phi2 = phi2(pa, sm);
    terms.total = terms.phi1 + terms.phi2;
    return terms;
}

PlaneAssignment construct_planes_oracle(const SimilarityMatrix& sm, int max_entities) {
    const int n_t = static_cast<int>(sm.cross.rows());
    const int n_d = static_cast<int>(sm.cross.cols());
    const int total = n_t + n_d;
    if (total > max_entities)
        throw std::invalid_argument("instance too large for exhaustive plane oracle");

    // Labels per entity (tracklets first): 0 = unassigned, k >= 1 = plane k-1,
    // restricted-growth so each plane labeling is enumerated exactly once, in
    // lexicographic order of the membership encoding.
    std::vector<int> labels(total, 0);
    PlaneAssignment best;
    double best_obj = 0.0;
    int best_planes = 0;
    std::vector<int> best_labels;
    bool have_best = false;

    auto consider = [&](int used_planes) {
        PlaneAssignment pa;
        pa.n_planes = used_planes;
        pa.tracklet_plane.assign(labels.begin(), labels.begin() + n_t);
        pa.detection_plane.assign(labels.begin() + n_t, labels.end());
        for (auto& x : pa.tracklet_plane) --x;
        for (auto& x : pa.detection_plane) --x;
        const double obj = evaluate(pa, sm).total;
        const bool better =
            !have_best || obj < best_obj ||
            (obj == best_obj && (used_planes < best_planes ||
                                 (used_planes == best_planes && labels < best_labels)));
        if (better) {
            pa.objective = obj;
            best = pa;
            best_obj = obj;
            best_planes = used_planes;
            best_labels = labels;
            have_best = true;
        }
    };

    auto recurse = [&](auto&& self, int idx, int used) -> void {
        if (idx == total) {
            consider(used);
            return;
        }
        for (int label = 0; label <= used + 1 && label <= total; ++label) {
            labels[idx] = label;
            self(self, idx + 1, std::max(used, label));
        }
        labels[idx] = 0;
    };
    recurse(recurse, 0, 0);
    return best;
}

namespace {

// One best-improvement local search from the given start, in place.
// Returns the number of applied moves.
int local_search(Planes& st, const SimilarityMatrix& sm, int max_iters) {
    const int n_t = static_cast<int>(st.t_plane.size());
    const int n_d = static_cast<int>(st.d_plane.size());
    const double improve_eps = 1e-12;

    auto cross_sum = [&](int i, const std::vector<int>& dets) {
        double s = 0.0;
        for (int j : dets) s += sm.cross(i, j);
        return s;
    };
    auto cross_sum_d = [&](int j, const std::vector<int>& tracks) {
        double s = 0.0;
        for (int i : tracks) s += sm.cross(i, j);
        return s;
    };
    auto pair_sum = [&](const Eigen::MatrixXd& pm, int a, const std::vector<int>& side) {
        double s = 0.0;
        for (int b : side)
            if (b != a) s += pm(a, b);
        return s;
    };

    int moves = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
        double best_delta = -improve_eps;
        int best_entity = -1;  // 0..n_t-1 tracklets, n_t..n_t+n_d-1 detections
        int best_target = -2;  // -1 unassigned, p plane index, count() new plane

        auto scan = [&](int entity, int cur, double remove_delta, auto&& insert_delta) {
            auto try_target = [&](int target) {
                const double delta = remove_delta + insert_delta(target);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_entity = entity;
                    best_target = target;
                }
            };
            if (cur != -1) try_target(-1);
            for (int p = 0; p < st.count(); ++p)
                if (p != cur) try_target(p);
            if (cur != -1) try_target(st.count());  // fresh singleton plane
        };

        for (int i = 0; i < n_t; ++i) {
            const int cur = st.t_plane[i];
            double remove_delta = 0.0;
            if (cur >= 0) {
                remove_delta += 2.0 * cross_sum(i, st.plane_detections[cur]);
                remove_delta -= 2.0 * pair_sum(sm.tracklet_pair, i, st.plane_tracklets[cur]);
            }
            scan(i, cur, remove_delta, [&](int target) {
                if (target < 0 || target >= st.count()) return 0.0;
                return -2.0 * cross_sum(i, st.plane_detections[target]) +
                       2.0 * pair_sum(sm.tracklet_pair, i, st.plane_tracklets[target]);
            });
        }
        for (int j = 0; j < n_d; ++j) {
            const int cur = st.d_plane[j];
            double remove_delta = 0.0;
            if (cur >= 0) {
                remove_delta += 2.0 * cross_sum_d(j, st.plane_tracklets[cur]);
                remove_delta -= 2.0 * pair_sum(sm.detection_pair, j, st.plane_detections[cur]);
            }
            scan(n_t + j, cur, remove_delta, [&](int target) {
                if (target < 0 || target >= st.count()) return 0.0;
                return -2.0 * cross_sum_d(j, st.plane_tracklets[target]) +
                       2.0 * pair_sum(sm.detection_pair, j, st.plane_detections[target]);
            });
        }

        if (best_entity < 0) break;
        const bool is_track = best_entity < n_t;
        const int idx = is_track ? best_entity : best_entity - n_t;
        const int cur = is_track ? st.t_plane[idx] : st.d_plane[idx];
        const int before = st.count();
        if (is_track)
            st.remove_tracklet(idx);
        else
            st.remove_detection(idx);
        // If the source plane vanished, targets past it slid down one slot.
        if (st.count() < before && best_target > cur) --best_target;
        if (best_target >= 0) {
            if (is_track)
                st.place_tracklet(idx, best_target);
            else
                st.place_detection(idx, best_target);
        }
        ++moves;
    }
    return moves;
}

// Restart 0: pair every mutually-best (tracklet, detection) with positive
// similarity into its own plane.
Planes greedy_mutual_best(const SimilarityMatrix& sm) {
    const int n_t = static_cast<int>(sm.cross.rows());
    const int n_d = static_cast<int>(sm.cross.cols());
    Planes st;
    st.reset(n_t, n_d);
    std::vector<int> best_det(n_t, -1), best_track(n_d, -1);
    for (int i = 0; i < n_t; ++i) {
        double best = 0.0;
        for (int j = 0; j < n_d; ++j)
            if (sm.cross(i, j) > best) {
                best = sm.cross(i, j);
                best_det[i] = j;
            }
    }
    for (int j = 0; j < n_d; ++j) {
        double best = 0.0;
        for (int i = 0; i < n_t; ++i)
            if (sm.cross(i, j) > best) {
                best = sm.cross(i, j);
                best_track[j] = i;
            }
    }
    for (int i = 0; i < n_t; ++i) {
        const int j = best_det[i];
        if (j >= 0 && best_track[j] == i) {
            const int p = st.count();
            st.place_tracklet(i, p);
            st.place_detection(j, p);
        }
    }
    return st;
}

Planes random_start(const SimilarityMatrix& sm, Rng& rng) {
    const int n_t = static_cast<int>(sm.cross.rows());
    const int n_d = static_cast<int>(sm.cross.cols());
    Planes st;
    st.reset(n_t, n_d);
    const int total = n_t + n_d;
    if (total == 0) return st;
    const int planes = rng.uniform_int(1, std::max(1, (total + 1) / 2));
    std::vector<int> raw(total);
    for (int e = 0; e < total; ++e) raw[e] = rng.uniform_int(-1, planes - 1);
    // Compact to used labels only.
    std::vector<int> relabel(planes, -1);
    int next = 0;
    for (int e = 0; e < total; ++e) {
        if (raw[e] < 0) continue;
        if (relabel[raw[e]] < 0) relabel[raw[e]] = next++;
        if (e < n_t)
            st.place_tracklet(e, relabel[raw[e]]);
        else
            st.place_detection(e - n_t, relabel[raw[e]]);
    }
    return st;
}

struct RestartOutcome {
    PlaneAssignment pa;
    int iterations = 0;
};

RestartOutcome run_restart(int restart, const SimilarityMatrix& sm, const TrackerConfig& cfg) {
    Planes st;
    if (restart == 0) {
        st = greedy_mutual_best(sm);
    } else {
        Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(restart)));
        st = random_start(sm, rng);
    }
    RestartOutcome out;
    out.iterations = local_search(st, sm, cfg.solver_max_iters);
    out.pa = st.to_assignment();
    out.pa.objective = evaluate(out.pa, sm).total;
    return out;
}

}  // namespace

SolverReport construct_planes(const SimilarityMatrix& sm, const TrackerConfig& cfg,
                              Execution exec) {
    const int restarts = std::max(1, cfg.solver_restarts);
    std::vector<RestartOutcome> outcomes(restarts);

    const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int r = 0; r < restarts; ++r) outcomes[r] = run_restart(r, sm, cfg);

    // Lowest objective wins, ties to the lowest restart index, so the pick is
    // identical to a sequential scan regardless of thread schedule.
    int best = 0;
    for (int r = 1; r < restarts; ++r)
        if (outcomes[r].pa.objective < outcomes[best].pa.objective) best = r;

    SolverReport report;
    report.best = std::move(outcomes[best].pa);
    report.restarts_run = restarts;
    for (const auto& o : outcomes) {
        report.iterations_per_restart.push_back(o.iterations);
        report.improved_steps += o.iterations;
    }
    return report;
}

MatchSet in_plane_match(const PlaneAssignment& pa, const SimilarityMatrix& sm,
                        const TrackerConfig& cfg, Execution exec) {
    check_dims(pa, sm);
    const auto ts = members_per_plane(pa.tracklet_plane, pa.n_planes);
    const auto ds = members_per_plane(pa.detection_plane, pa.n_planes);

    std::vector<MatchSet> per_plane(pa.n_planes);
    const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int p = 0; p < pa.n_planes; ++p) {
        const auto& rows = ts[p];
        const auto& cols = ds[p];
        if (rows.empty() || cols.empty()) continue;
        Eigen::MatrixXd sub(rows.size(), cols.size());
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b)
                sub(a, b) = sm.cross(rows[a], cols[b]);
        MatchSet local = km_assign(sub, cfg.tau_match);
        for (const auto& [a, b] : local.pairs)
            per_plane[p].pairs.emplace_back(rows[a], cols[b]);
        per_plane[p].total_similarity = local.total_similarity;
    }

    // Merge in plane order; totals accumulate in the same order as a serial run.
    MatchSet out;
    for (const auto& ms : per_plane) {
        out.pairs.insert(out.pairs.end(), ms.pairs.begin(), ms.pairs.end());
        out.total_similarity += ms.total_similarity;
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

}  // namespace bpm
