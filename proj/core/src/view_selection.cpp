#include "raysel/view_selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "raysel/errors.hpp"

namespace raysel {

namespace {

using Words = std::vector<std::uint64_t>;

int popcount(const Words& w) {
  int c = 0;
  for (auto x : w) c += std::popcount(x);
  return c;
}

// Greedy set cover: repeatedly take the camera covering the most uncovered
// points, lowest index on ties. Serves as the fallback solver and as the
// branch-and-bound incumbent.
std::vector<int> greedy_cover(const std::vector<Words>& cam_pts,
                              int num_points) {
  const int n = static_cast<int>(cam_pts.size());
  const std::size_t words = cam_pts.empty() ? 0 : cam_pts[0].size();
  Words covered(words, 0);
  std::vector<int> chosen;
  int num_covered = 0;
  while (num_covered < num_points) {
    int best_cam = -1;
    int best_gain = 0;
    for (int i = 0; i < n; ++i) {
      int gain = 0;
      for (std::size_t w = 0; w < words; ++w)
        gain += std::popcount(cam_pts[i][w] & ~covered[w]);
      if (gain > best_gain) {
        best_gain = gain;
        best_cam = i;
      }
    }
    if (best_cam < 0) break;  // feasibility is checked by the caller
    for (std::size_t w = 0; w < words; ++w) covered[w] |= cam_pts[best_cam][w];
    num_covered += best_gain;
    chosen.push_back(best_cam);
  }
  return chosen;
}

// Exact minimum set cover. Branches on the uncovered point with the fewest
// candidate cameras; prunes with a disjoint-point packing lower bound
// (points whose camera sets are pairwise disjoint each demand a distinct
// camera). Camera masks fit a word because exact solving caps N at 64.
class ExactCover {
 public:
  ExactCover(const std::vector<Words>& cam_pts,
             const std::vector<std::uint64_t>& point_cams, int num_points)
      : cam_pts_(cam_pts), point_cams_(point_cams), num_points_(num_points),
        words_(cam_pts.empty() ? 0 : cam_pts[0].size()) {}

  std::vector<int> solve(std::vector<int> incumbent) {
    best_ = std::move(incumbent);
    Words covered(words_, 0);
    std::vector<int> chosen;
    dfs(covered, chosen);
    std::sort(best_.begin(), best_.end());
    return best_;
  }

 private:
  bool covered_point(const Words& covered, int j) const {
    return (covered[j >> 6] >> (j & 63)) & 1u;
  }

  int packing_lower_bound(const Words& covered) const {
    std::uint64_t used = 0;
    int lb = 0;
    for (int j = 0; j < num_points_; ++j) {
      if (covered_point(covered, j)) continue;
      if ((point_cams_[j] & used) == 0) {
        ++lb;
        used |= point_cams_[j];
      }
    }
    return lb;
  }

  void dfs(Words& covered, std::vector<int>& chosen) {
    // Branch target: uncovered point with the fewest candidate cameras.
    int branch_point = -1;
    int branch_degree = std::numeric_limits<int>::max();
    for (int j = 0; j < num_points_; ++j) {
      if (covered_point(covered, j)) continue;
      const int deg = std::popcount(point_cams_[j]);
      if (deg < branch_degree) {
        branch_degree = deg;
        branch_point = j;
      }
    }
    if (branch_point < 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    if (chosen.size() + packing_lower_bound(covered) >= best_.size()) return;

    std::uint64_t cams = point_cams_[branch_point];
    while (cams) {
      const int i = std::countr_zero(cams);
      cams &= cams - 1;
      Words saved = covered;
      for (std::size_t w = 0; w < words_; ++w) covered[w] |= cam_pts_[i][w];
      chosen.push_back(i);
      dfs(covered, chosen);
      chosen.pop_back();
      covered = std::move(saved);
    }
  }

  const std::vector<Words>& cam_pts_;
  const std::vector<std::uint64_t>& point_cams_;
  int num_points_;
  std::size_t words_;
  std::vector<int> best_;
};

}  // namespace

CoverageSolution min_coverage_set(const VisibilityMatrix& vis,
                                  const CoverageOptions& options) {
  const int n = vis.num_cameras;
  const int m = vis.num_points;
  if (n < 1 || m < 1) throw InputError("empty visibility matrix");

  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  std::vector<Words> cam_pts(n, Words(words, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (vis.at(i, j)) cam_pts[i][j >> 6] |= 1ull << (j & 63);

  for (int j = 0; j < m; ++j) {
    bool seen = false;
    for (int i = 0; i < n && !seen; ++i) seen = vis.at(i, j);
    if (!seen) throw InfeasibleCoverageError(j);
  }

  std::vector<int> greedy = greedy_cover(cam_pts, m);

  CoverageSolution sol;
  if (n <= options.exact_threshold && n <= 64) {
    std::vector<std::uint64_t> point_cams(m, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (vis.at(i, j)) point_cams[j] |= 1ull << i;
    sol.selected = ExactCover(cam_pts, point_cams, m).solve(std::move(greedy));
    sol.optimal = true;
  } else {
    std::sort(greedy.begin(), greedy.end());
    sol.selected = std::move(greedy);
    sol.optimal = false;
  }
  sol.k_min = static_cast<int>(sol.selected.size());
  return sol;
}

BaselineMatrix baseline_matrix(const std::vector<Camera>& cams) {
  const int n = static_cast<int>(cams.size());
  if (n < 2) throw InputError("baseline matrix needs >= 2 cameras");
  BaselineMatrix mat;
  mat.n = n;
  mat.b.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<Vec3> axes(n);
  for (int i = 0; i < n; ++i) axes[i] = cams[i].forward();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double cosang =
          axes[i].dot(axes[j]) / (axes[i].norm() * axes[j].norm());
      const double angle = std::acos(std::clamp(cosang, -1.0, 1.0));
      mat.b[static_cast<std::size_t>(i) * n + j] = angle;
      mat.b[static_cast<std::size_t>(j) * n + i] = angle;
    }
  }
  return mat;
}

ViewSchedule greedy_schedule(const BaselineMatrix& baselines,
                             const CoverageSolution& initial) {
  if (initial.selected.empty())
    throw InputError("greedy schedule needs a non-empty initial set");
  const int n = baselines.n;
  std::vector<bool> in_schedule(n, false);
  for (int i : initial.selected) {
    if (i < 0 || i >= n) throw InputError("initial camera index out of range");
    if (in_schedule[i]) throw InputError("initial set has duplicate indices");
    in_schedule[i] = true;
  }

  ViewSchedule schedule;
  schedule.order = initial.selected;
  schedule.coverage_prefix_len = static_cast<int>(initial.selected.size());
  schedule.order.reserve(n);

  while (static_cast<int>(schedule.order.size()) < n) {
    int best_cam = -1;
    double best_score = -1.0;
    for (int r = 0; r < n; ++r) {
      if (in_schedule[r]) continue;
      double score = std::numeric_limits<double>::infinity();
      for (int s : schedule.order) score = std::min(score, baselines.at(r, s));
      if (score > best_score) {
        best_score = score;
        best_cam = r;
      }
    }
    in_schedule[best_cam] = true;
    schedule.order.push_back(best_cam);
  }
  return schedule;
}

std::vector<int> select_views(const std::vector<Camera>& cams,
                              const ProxyGrid& grid, const DepthBounds& bounds,
                              int k, const CoverageOptions& options,
                              int threads) {
  const int n = static_cast<int>(cams.size());
  if (k < 1) throw InputError("k must be >= 1");
  if (k > n) throw InputError("k exceeds the number of cameras");
  const VisibilityMatrix vis = visibility_matrix(cams, grid, bounds, threads);
  const CoverageSolution cover = min_coverage_set(vis, options);
  if (k < cover.k_min) throw KTooSmallError(k, cover.k_min);
  if (n == 1) return {0};
  const ViewSchedule schedule = greedy_schedule(baseline_matrix(cams), cover);
  return std::vector<int>(schedule.order.begin(), schedule.order.begin() + k);
}

}  // namespace raysel
