#include "adflat/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adflat {

GridIndex::GridIndex(const Mat& points, double cell)
    : points_(&points), cell_(cell), d_(static_cast<int>(points.rows())) {
  std::vector<int> all(points.cols());
  for (int i = 0; i < points.cols(); ++i) all[i] = i;
  build(all);
}

GridIndex::GridIndex(const Mat& points, const std::vector<int>& subset,
                     double cell)
    : points_(&points), cell_(cell), d_(static_cast<int>(points.rows())) {
  build(subset);
}

void GridIndex::build(const std::vector<int>& subset) {
  cells_.reserve(subset.size());
  for (int i : subset) cells_[cell_key(points_->col(i))].push_back(i);
}

std::uint64_t GridIndex::cell_key(const Eigen::Ref<const Vec>& x) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int a = 0; a < d_; ++a) {
    long long c = static_cast<long long>(std::floor(x(a) / cell_));
    h = fnv1a64(&c, sizeof(c), h);
  }
  return h;
}

std::uint64_t GridIndex::key_of(const std::vector<long long>& c) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int a = 0; a < d_; ++a) h = fnv1a64(&c[a], sizeof(long long), h);
  return h;
}

void GridIndex::query_ball_append(const Eigen::Ref<const Vec>& x, double r,
                                  std::vector<int>& out) const {
  double r2 = r * r;
  std::vector<long long> lo(d_), hi(d_), cur(d_);
  for (int a = 0; a < d_; ++a) {
    lo[a] = static_cast<long long>(std::floor((x(a) - r) / cell_));
    hi[a] = static_cast<long long>(std::floor((x(a) + r) / cell_));
    cur[a] = lo[a];
  }
  for (;;) {
    auto it = cells_.find(key_of(cur));
    if (it != cells_.end()) {
      for (int i : it->second)
        if ((points_->col(i) - x).squaredNorm() <= r2) out.push_back(i);
    }
    int a = d_ - 1;
    while (a >= 0) {
      if (++cur[a] <= hi[a]) break;
      cur[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

std::vector<int> GridIndex::query_ball(const Eigen::Ref<const Vec>& x,
                                       double r) const {
  std::vector<int> out;
  query_ball_append(x, r, out);
  std::sort(out.begin(), out.end());
  return out;
}

double GridIndex::nearest_distance(const Eigen::Ref<const Vec>& x) const {
  if (cells_.empty()) return std::numeric_limits<double>::infinity();
  double r = cell_;
  for (;;) {
    std::vector<int> hits;
    query_ball_append(x, r, hits);
    if (!hits.empty()) {
      // Every unprobed point is farther than r, so the minimum is global.
      double best = std::numeric_limits<double>::infinity();
      for (int i : hits) best = std::min(best, (points_->col(i) - x).norm());
      return best;
    }
    r *= 2.0;
  }
}

}  // namespace adflat
