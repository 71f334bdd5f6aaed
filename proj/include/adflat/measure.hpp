#ifndef ADFLAT_MEASURE_HPP
#define ADFLAT_MEASURE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adflat/common.hpp"

namespace adflat {

// Weighted point cloud standing in for an n-dimensional AD-regular measure
// in R^d. All downstream computations treat the cloud itself as the measure;
// quadrature error against any continuum object enters only through the
// resolution h.
struct DiscreteMeasure {
  int d = 0;             // ambient dimension
  int n = 0;             // intrinsic dimension, 0 < n <= d
  Mat points;            // d x N, column i = coordinates of sample i
  Vec weights;           // N positive reals, units of H^n mass
  double h = 0.0;        // nominal inter-sample spacing
  std::string label;

  int size() const { return static_cast<int>(points.cols()); }
  double total_mass() const { return weights.sum(); }
  Eigen::Ref<const Vec> point(int i) const { return points.col(i); }

  // Exact max pairwise distance for small N, two-sweep lower bound refined by
  // a full pass otherwise. Deterministic.
  double diameter() const;

  // Mass inside the closed Euclidean ball.
  double ball_mass(const Ball& b) const;

  // Throws ValidationError when an invariant fails.
  void validate() const;

  std::uint64_t content_hash() const;
};

struct FlatPatchSpec {
  int d = 2;
  int n = 1;
  Vec base;              // plane base point (defaults to origin)
  Mat frame;             // d x n orthonormal frame (defaults to first n axes)
  double side = 1.0;
  int resolution = 100;  // grid points per axis
  double c = 1.0;        // density of c * H^n|L
};

struct LipschitzGraphSpec {
  int d = 2;
  int n = 1;
  double side = 1.0;             // domain cube [0, side]^n
  int resolution = 64;           // grid points per axis
  std::function<Vec(const Vec&)> graph;     // A : R^n -> R^{d-n}
  std::function<double(const Vec&)> density;  // rho, defaults to 1
  std::string family;            // provenance text, e.g. "sine:0.5:1"
};

struct Cantor4Spec {
  int d = 2;
  int generation = 3;    // N; 4^N corner points
  double side = 1.0;     // side of the starting square, total mass = side
};

struct FileSpec {
  std::string path;
};

using MeasureSpec =
    std::variant<FlatPatchSpec, LipschitzGraphSpec, Cantor4Spec, FileSpec>;

DiscreteMeasure generate_measure(const MeasureSpec& spec);

// Built-in graph families for configs and the CLI:
//   zero | const:<v> | linear:<slope> | sine:<amp>:<freq>
LipschitzGraphSpec make_graph_spec(int d, int n, double side, int resolution,
                                   const std::string& family);

// || grad A ||_2^2 over the domain by grid quadrature of the same finite
// differences the generator uses.
double graph_grad_norm_sq(const LipschitzGraphSpec& spec);

DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& m, const std::string& path);

struct RegularityProbe {
  int center_index = 0;
  double radius = 0.0;
  double ratio = 0.0;  // mu(B(x,r)) / r^n
};

struct RegularityReport {
  double c0_lower = 0.0;
  double c0_upper = 0.0;
  std::vector<double> probed_scales;
  int probe_count = 0;
  std::vector<RegularityProbe> violations;  // outside tolerance band
  std::uint64_t seed = 0;
};

// Empirical AD-regularity constants over sampled (center, radius) probes.
// Radii must lie in [4h, diameter]. A probe is a violation when its ratio
// falls outside [g / tolerance, g * tolerance] around the geometric mean g.
RegularityReport ad_regularity_report(const DiscreteMeasure& m,
                                      const std::vector<double>& radii,
                                      int center_count, std::uint64_t seed,
                                      double tolerance = 4.0);

// Restriction keeps exactly the points inside the region, weights unchanged.
// Throws EmptyRestrictionError when nothing survives.
DiscreteMeasure restrict_ball(const DiscreteMeasure& m, const Ball& b);
DiscreteMeasure restrict_indices(const DiscreteMeasure& m,
                                 const std::vector<int>& indices,
                                 const std::string& region_note);

}  // namespace adflat

#endif  // ADFLAT_MEASURE_HPP
