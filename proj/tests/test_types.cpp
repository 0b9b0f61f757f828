#include <limits>

#include "bpm/types.hpp"
#include "doctest.h"

using namespace bpm;

TEST_CASE("normalized_embedding rescales to unit length") {
    Eigen::VectorXd v(2);
    v << 3.0, 4.0;
    const Eigen::VectorXd u = normalized_embedding(v);
    CHECK(u(0) == 0.6);
    CHECK(u(1) == 0.8);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized_embedding rejects bad input") {
    CHECK_THROWS_AS(normalized_embedding(Eigen::VectorXd()), std::invalid_argument);
    CHECK_THROWS_AS(normalized_embedding(Eigen::VectorXd::Zero(3)), std::invalid_argument);
    Eigen::VectorXd bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(normalized_embedding(bad), std::invalid_argument);
}

TEST_CASE("make_detection validates and normalizes") {
    Eigen::VectorXd e(2);
    e << 2.0, 0.0;
    const Detection d = make_detection(3, {1, 2, 10, 20}, 0.9, e, 4);
    CHECK(d.frame == 3);
    CHECK(d.box.x == 1.0);
    CHECK(d.confidence == 0.9);
    CHECK(d.source_index == 4);
    REQUIRE(d.embedding.has_value());
    CHECK((*d.embedding)(0) == 1.0);

    CHECK_THROWS_AS(make_detection(0, {0, 0, 1, 1}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_detection(1, {0, 0, 0, 1}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_detection(1, {0, 0, 1, 1}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_detection(1, {0, 0, 1, 1}, -0.1), std::invalid_argument);
}

TEST_CASE("detection without embedding is allowed") {
    const Detection d = make_detection(1, {0, 0, 1, 1}, 0.5);
    CHECK_FALSE(d.embedding.has_value());
}

TEST_CASE("validate_assignment accepts the empty assignment") {
    CHECK(validate_assignment(PlaneAssignment{}, 0, 0).empty());

    PlaneAssignment pa;
    pa.tracklet_plane = {-1, -1};
    pa.detection_plane = {-1};
    CHECK(validate_assignment(pa, 2, 1).empty());
}

TEST_CASE("validate_assignment reports out-of-range plane indices") {
    PlaneAssignment pa;
    pa.n_planes = 2;
    pa.tracklet_plane = {5};
    pa.detection_plane = {0, 1};
    const auto violations = validate_assignment(pa, 1, 2);
    REQUIRE_FALSE(violations.empty());
    bool mentions_range = false;
    for (const auto& v : violations)
        if (v.find("out of range") != std::string::npos) mentions_range = true;
    CHECK(mentions_range);
}

TEST_CASE("validate_assignment reports empty planes") {
    PlaneAssignment pa;
    pa.n_planes = 2;
    pa.tracklet_plane = {0};
    pa.detection_plane = {0};
    const auto violations = validate_assignment(pa, 1, 1);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("empty plane") != std::string::npos);
}

TEST_CASE("validate_assignment reports size mismatches") {
    PlaneAssignment pa;
    pa.tracklet_plane = {-1};
    pa.detection_plane = {};
    CHECK_FALSE(validate_assignment(pa, 2, 0).empty());
}

TEST_CASE("a constructively valid assignment reports ok") {
    PlaneAssignment pa;
    pa.n_planes = 2;
    pa.tracklet_plane = {0, 1, -1};
    pa.detection_plane = {0, 1};
    CHECK(validate_assignment(pa, 3, 2).empty());
}

TEST_CASE("tracker config defaults") {
    const TrackerConfig cfg;
    CHECK(cfg.lambda_s == 1.0);
    CHECK(cfg.tau_match == 0.3);
    CHECK(cfg.tau_det == 0.4);
    CHECK(cfg.max_age == 30);
    CHECK(cfg.n_init == 3);
    CHECK(cfg.solver_restarts == 8);
    CHECK(cfg.solver_max_iters == 200);
    CHECK(cfg.rng_seed == 1);
}
