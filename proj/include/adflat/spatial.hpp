#ifndef ADFLAT_SPATIAL_HPP
#define ADFLAT_SPATIAL_HPP

#include <unordered_map>
#include <vector>

#include "adflat/common.hpp"

namespace adflat {

// Uniform grid hash for fixed-radius neighbor queries in R^d. Cell size
// should match the query radius; queries enumerate the surrounding cell
// block and filter exactly.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const Mat& points, double cell);
  GridIndex(const Mat& points, const std::vector<int>& subset, double cell);

  double cell() const { return cell_; }

  // Indices (into the original matrix) of points with |p - x| <= r,
  // ascending. r may exceed the cell size.
  std::vector<int> query_ball(const Eigen::Ref<const Vec>& x, double r) const;

  // Appends hits to out without sorting; used by hot loops that sort once.
  void query_ball_append(const Eigen::Ref<const Vec>& x, double r,
                         std::vector<int>& out) const;

  // Distance to the nearest indexed point, expanding the search shell until
  // a hit is certain. Returns +inf for an empty index.
  double nearest_distance(const Eigen::Ref<const Vec>& x) const;

 private:
  void build(const std::vector<int>& subset);

  std::uint64_t cell_key(const Eigen::Ref<const Vec>& x) const;
  std::uint64_t key_of(const std::vector<long long>& c) const;

  const Mat* points_ = nullptr;
  double cell_ = 1.0;
  int d_ = 0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace adflat

#endif  // ADFLAT_SPATIAL_HPP
