#ifndef ADFLAT_BL_LP_HPP
#define ADFLAT_BL_LP_HPP

#include <string>
#include <vector>

#include "adflat/measure.hpp"

namespace adflat {

// Exact solver for the bounded-Lipschitz linear program on a fixed support:
//
//   maximize sum_i f_i s_i   over  |f_i - f_j| <= |p_i - p_j|,
//                                  |f_i| <= dist(p_i, boundary of B).
//
// Solved through its min-cost-flow dual: transport the signed supply s
// between support points (cost = Euclidean distance) or to/from the ball
// boundary (cost = boundary distance). Successive shortest paths with
// Johnson potentials; potentials are kept warm across solves so that
// repeated solves over the same support (the inner c-search of alpha) get
// cheaper.
class BlProblem {
 public:
  BlProblem(const Mat& support, const Ball& ball);

  struct Solution {
    double value = 0.0;       // LP optimum = dual objective sum_i s_i f_i
    Vec f;                    // optimal Lipschitz values per support point
    double primal_cost = 0.0; // transport cost; equals value up to tolerance
    int augmentations = 0;
  };

  Solution solve(const Vec& supply);

  int size() const { return V_; }
  const Vec& boundary_distance() const { return bnd_; }

 private:
  double cost(int u, int v) const {
    if (u == V_) return bnd_(v);
    if (v == V_) return bnd_(u);
    return dist_(u, v);
  }

  int V_ = 0;      // support size; node V_ is the ball boundary
  Mat dist_;       // pairwise distances
  Vec bnd_;        // distance to the boundary sphere
  Vec potential_;  // V_+1 Johnson potentials, warm across solves
  Mat flow_;       // dense flow matrix, reset per solve
};

struct BlResult {
  double value = 0.0;
  Vec f;               // per merged support point
  Mat support;         // d x M merged support (lexicographically sorted)
  Vec net_supply;      // sigma - nu per support point
  int dropped = 0;     // points outside B, dropped with a warning count
};

struct BlOptions {
  int support_cap = 4096;  // combined support size limit after merging
};

// dist_B(sigma, nu). Exact for discrete measures; symmetric bit-for-bit
// (the support is canonically ordered and the supply sign canonicalized).
BlResult bl_distance(const DiscreteMeasure& sigma, const DiscreteMeasure& nu,
                     const Ball& ball, const BlOptions& opts = {});

}  // namespace adflat

#endif  // ADFLAT_BL_LP_HPP
