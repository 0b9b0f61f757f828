#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bpm/metrics.hpp"
#include "bpm/tracker.hpp"
#include "bpm/types.hpp"

namespace bpm {

struct ParseError : std::runtime_error {
    ParseError(const std::string& path, int line, const std::string& what);
    int line_number;
};

// MOTChallenge text rows: frame,id,x,y,w,h,conf,-1,-1,-1. Input detections
// carry id -1. Writers emit 4 decimals, rows sorted by (frame, id); readers
// accept unsorted frames. Decimal point only, locale-independent.
std::map<int, std::vector<Detection>> read_detections(const std::string& path);
LabeledSequence read_labeled(const std::string& path);

void write_detections(const std::string& path,
                      const std::map<int, std::vector<Detection>>& dets);
void write_labeled(const std::string& path, const LabeledSequence& seq);
void write_result(const std::string& path, const TrackingResult& result);

// Embedding sidecar: header line "d=<dim>", then rows frame,source_index,
// v1,...,vd. Vectors are renormalized on read; zero vectors are an error.
using EmbeddingTable = std::map<std::pair<int, int>, Eigen::VectorXd>;
EmbeddingTable read_embeddings(const std::string& path);
void write_embeddings(const std::string& path,
                      const std::map<int, std::vector<Detection>>& dets);
void attach_embeddings(std::map<int, std::vector<Detection>>& dets,
                       const EmbeddingTable& table);

// Score sidecar: rows frame,source_index,score with score in [0,1].
ScoreMap read_scores(const std::string& path);

// Flat key = value file mapping exactly onto TrackerConfig; '#' starts a
// comment, unknown keys are errors, absent keys keep their defaults.
TrackerConfig load_config(const std::string& path);

}  // namespace bpm
