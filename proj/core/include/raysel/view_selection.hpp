#pragma once

#include <vector>

#include "raysel/geometry.hpp"

namespace raysel {

// Minimal scene-coverage subset. `optimal` is true when the solution was
// proved minimum by branch and bound (instances up to exact_threshold
// cameras); otherwise the greedy log-factor cover is returned.
struct CoverageSolution {
  std::vector<int> selected;  // sorted camera indices
  int k_min = 0;              // selected.size()
  bool optimal = false;
};

struct CoverageOptions {
  // Largest camera count solved exactly; greedy fallback above.
  int exact_threshold = 64;
};

// Minimum-cardinality camera subset covering every grid point.
// Throws InfeasibleCoverageError naming the first uncovered point when the
// instance is infeasible.
CoverageSolution min_coverage_set(const VisibilityMatrix& vis,
                                  const CoverageOptions& options = {});

// Symmetric matrix of angles (radians, [0, pi]) between camera optical axes.
struct BaselineMatrix {
  int n = 0;
  std::vector<double> b;  // row-major n x n, zero diagonal

  double at(int i, int j) const {
    return b[static_cast<std::size_t>(i) * n + j];
  }
};

BaselineMatrix baseline_matrix(const std::vector<Camera>& cams);

// Full camera ordering: the coverage set first (sorted by index), then each
// remaining camera by decreasing max-min baseline angle against everything
// already selected. Ties break on the lowest camera index.
struct ViewSchedule {
  std::vector<int> order;        // permutation of 0..N-1
  int coverage_prefix_len = 0;   // k_min
};

ViewSchedule greedy_schedule(const BaselineMatrix& baselines,
                             const CoverageSolution& initial);

// End-to-end selection: visibility -> minimal cover -> greedy schedule,
// truncated to the first k entries. Throws KTooSmallError when k < k_min.
std::vector<int> select_views(const std::vector<Camera>& cams,
                              const ProxyGrid& grid, const DepthBounds& bounds,
                              int k, const CoverageOptions& options = {},
                              int threads = 1);

}  // namespace raysel
