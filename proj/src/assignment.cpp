#include "bpm/assignment.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace bpm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Square min-cost perfect assignment (Jonker-Volgenant style potentials),
// O(N^3). Returns the column of each row plus the dual potentials; matched
// edges are tight (cost == u + v) and all edges satisfy cost >= u + v up to
// rounding.
struct SquareSolution {
    std::vector<int> row_to_col;
    std::vector<double> u, v;
};

template <typename CostFn>
SquareSolution solve_square(int n, const CostFn& cost) {
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    SquareSolution sol;
    sol.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) sol.row_to_col[p[j] - 1] = j - 1;
    sol.u.assign(u.begin() + 1, u.end());
    sol.v.assign(v.begin() + 1, v.end());
    return sol;
}

}  // namespace

MatchSet km_assign(const Eigen::MatrixXd& weights, double gate) {
    const int n = static_cast<int>(weights.rows());
    const int m = static_cast<int>(weights.cols());
    MatchSet out;
    if (n == 0 || m == 0) return out;
    if (!weights.allFinite())
        throw std::invalid_argument("km_assign requires finite weights");

    // A pair can appear in a maximum-total matching only if it clears the
    // gate and is non-negative (a negative link always lowers the total).
    // Benefit 0 doubles as "leave unmatched" in the padded square problem.
    auto benefit = [&](int i, int j) -> double {
        const double w = weights(i, j);
        return (w > gate && w >= 0.0) ? w : 0.0;
    };
    auto admissible = [&](int i, int j) { return weights(i, j) > gate && weights(i, j) >= 0.0; };

    const double scale = 1.0 + weights.cwiseAbs().maxCoeff();
    const double tie_tol = 1e-9 * scale * std::min(n, m);
    const double rc_tol = 1e-9 * scale;

    // Optimal total over a sub-instance (row/col index lists), padded square.
    auto opt = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        const int nr = static_cast<int>(rows.size());
        const int nc = static_cast<int>(cols.size());
        const int N = std::max(nr, nc);
        struct Result {
            double value = 0.0;
            std::vector<int> row_to_col;  // into `cols`, -1 if padded away
        } res;
        if (N == 0) return res;
        auto sol = solve_square(N, [&](int a, int b) {
            return (a < nr && b < nc) ? -benefit(rows[a], cols[b]) : 0.0;
        });
        res.row_to_col.assign(nr, -1);
        for (int a = 0; a < nr; ++a) {
            const int b = sol.row_to_col[a];
            if (b >= 0 && b < nc && benefit(rows[a], cols[b]) > 0.0) {
                res.row_to_col[a] = b;
                res.value += benefit(rows[a], cols[b]);
            }
        }
        return res;
    };

    // Phase 1: one full solve gives the optimal total and dual potentials.
    const int N = std::max(n, m);
    auto full = solve_square(N, [&](int i, int j) {
        return (i < n && j < m) ? -benefit(i, j) : 0.0;
    });
    double best_total = 0.0;
    std::vector<int> current(n, -1);  // running optimal completion
    for (int i = 0; i < n; ++i) {
        const int j = full.row_to_col[i];
        if (j >= 0 && j < m && benefit(i, j) > 0.0) {
            current[i] = j;
            best_total += benefit(i, j);
        }
    }

    // Phase 2: canonicalize ties. Walk rows in order and give each the lowest
    // admissible column that still permits an optimal completion. Candidate
    // columns must be tight against the phase-1 duals, so on tie-free inputs
    // this pass does no extra solves.
    std::vector<char> col_used(m, 0);
    double fixed_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        int chosen = -1;
        for (int j = 0; j < m; ++j) {
            if (col_used[j] || !admissible(i, j)) continue;
            if (j == current[i] && benefit(i, j) > 0.0) {  // witnessed by `current`
                chosen = j;
                break;
            }
            const double rc = -benefit(i, j) - full.u[i] - full.v[j];
            if (rc > rc_tol) continue;
            std::vector<int> rest_rows, rest_cols;
            for (int r = i + 1; r < n; ++r) rest_rows.push_back(r);
            for (int c = 0; c < m; ++c)
                if (!col_used[c] && c != j) rest_cols.push_back(c);
            auto tail = opt(rest_rows, rest_cols);
            if (fixed_sum + benefit(i, j) + tail.value >= best_total - tie_tol) {
                chosen = j;
                // The tail matching becomes the new witness for later rows.
                for (int r = i + 1; r < n; ++r) {
                    const int b = tail.row_to_col[r - (i + 1)];
                    current[r] = b >= 0 ? rest_cols[b] : -1;
                }
                break;
            }
        }
        if (chosen >= 0) {
            col_used[chosen] = 1;
            fixed_sum += benefit(i, chosen);
            out.pairs.emplace_back(i, chosen);
        }
    }

    for (const auto& [i, j] : out.pairs) out.total_similarity += weights(i, j);
    return out;
}

}  // namespace bpm
