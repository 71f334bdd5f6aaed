#ifndef ADFLAT_FLAT_METRIC_HPP
#define ADFLAT_FLAT_METRIC_HPP

#include <cstdint>

#include "adflat/bl_lp.hpp"
#include "adflat/lattice.hpp"
#include "adflat/plane.hpp"

namespace adflat {

struct AlphaOptions {
  int subsample_cap = 256;      // M: aggregate B_Q support beyond this
  double grid_divisor = 32.0;   // flat grid step g = l(Q) / grid_divisor
  int multistarts = 4;
  int max_outer_evals = 160;    // plane-search budget per start
  double c_rel_tol = 1e-3;      // golden-section tolerance on c
  int max_refines = 2;          // g -> g/2 refinements on >10% value change
  std::uint64_t seed = 1;
  bool ball_diameter_variant = false;  // B(z_Q, 3 d(Q)) instead of 3 l(Q)
};

struct AlphaRecord {
  int cube_id = -1;
  int j = 0;
  double alpha = 0.0;     // lp_value / l(Q)^{n+1}
  double c_q = 0.0;
  Plane plane;            // L_Q
  double lp_value = 0.0;  // dist_{B_Q}(mu, c_Q H^n|L_Q) at the optimum
  // solver diagnostics
  int iterations = 0;          // outer plane evaluations, all starts
  int multistart_index = 0;    // start that produced the optimum
  int subsample_size = 0;      // support size after aggregation
  double aggregation_error = 0.0;
  double grid_g = 0.0;         // final flat grid step
  double alpha_at_init = 0.0;  // value at the beta_2 seed plane, final grid
};

// alpha(Q): scale-normalized bounded-Lipschitz distance from mu to the best
// flat measure c H^n|L on B_Q. The plane search is a documented heuristic
// (beta_2 seed + multistart + coordinate descent), so the result is an upper
// bound on the true infimum; the inner c-minimization is a golden-section
// search on a convex function and the LP itself is exact.
AlphaRecord alpha(const DiscreteMeasure& m, const Lattice& lat, int cube_id,
                  const AlphaOptions& opts = {});

// Aggregated restriction of m to the ball: grid clustering at the coarsest
// dyadic scale that yields at most cap clusters, representative points
// snapped back to support points.
struct Aggregated {
  Mat points;
  Vec weights;
  std::vector<int> source_index;  // representative's index into m
  double aggregation_error = 0.0;
  int raw_count = 0;
};
Aggregated aggregate_ball(const DiscreteMeasure& m, const Ball& ball, int cap);

}  // namespace adflat

#endif  // ADFLAT_FLAT_METRIC_HPP
