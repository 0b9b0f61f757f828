#pragma once

#include <vector>

#include "bpm/assignment.hpp"
#include "bpm/similarity.hpp"
#include "bpm/types.hpp"

namespace bpm {

struct ObjectiveTerms {
    double phi1 = 0.0;  // cross-side reward (negative sum)
    double phi2 = 0.0;  // same-side penalty
    double total = 0.0; // phi1 + phi2, exact
};

struct SolverReport {
    PlaneAssignment best;
    int restarts_run = 0;
    std::vector<int> iterations_per_restart;
    int improved_steps = 0;
};

// Cross-side reward: -sum over planes of 2 * cross(i, j) for every tracklet i
// and detection j connected to the same plane.
double phi1(const PlaneAssignment& pa, const SimilarityMatrix& sm);

// Same-side penalty: sum over planes of the ordered-pair same-side
// similarities (each unordered pair counted twice, mirroring the factor 2 in
// the cross-side term).
double phi2(const PlaneAssignment& pa, const SimilarityMatrix& sm);

ObjectiveTerms evaluate(const PlaneAssignment& pa, const SimilarityMatrix& sm);

// Exhaustive minimizer over every placement of each entity into a plane or
// unassigned (plane labels canonical by first appearance). Ties break toward
// fewer planes, then the lexicographically smallest membership encoding.
// Throws when n_t + n_d exceeds max_entities.
PlaneAssignment construct_planes_oracle(const SimilarityMatrix& sm, int max_entities = 8);

// Seeded multi-restart best-improvement local search over single-entity
// relocation moves (to another plane, a new plane, or unassigned). Restart 0
// starts from greedy mutual-best pairing, the rest from random memberships.
// Deterministic for a fixed cfg.rng_seed under either execution policy.
SolverReport construct_planes(const SimilarityMatrix& sm, const TrackerConfig& cfg,
                              Execution exec = Execution::parallel);

// Optimal one-to-one matching inside each plane (gate cfg.tau_match); pairs
// never cross plane boundaries.
MatchSet in_plane_match(const PlaneAssignment& pa, const SimilarityMatrix& sm,
                        const TrackerConfig& cfg, Execution exec = Execution::parallel);

}  // namespace bpm
