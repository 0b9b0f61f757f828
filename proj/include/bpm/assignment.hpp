#pragma once

#include <Eigen/Dense>

#include "bpm/types.hpp"

namespace bpm {

// Maximum-total-weight one-to-one matching (Kuhn-Munkres), leaving entries
// unmatched when that is better. Only pairs with weight strictly above `gate`
// are ever linked. Rectangular matrices leave the surplus side unmatched.
//
// Ties between equal-total matchings are broken deterministically: the result
// is the optimal matching whose row->column sequence is lexicographically
// smallest (lower rows matched first, each to its lowest admissible column).
// Totals within 1e-9 (relative to the weight scale) count as tied.
MatchSet km_assign(const Eigen::MatrixXd& weights, double gate);

}  // namespace bpm
