#ifndef ADFLAT_PLANE_HPP
#define ADFLAT_PLANE_HPP

#include "adflat/measure.hpp"

namespace adflat {

// Affine n-plane in R^d with an orthonormal frame.
struct Plane {
  Vec base;   // d
  Mat frame;  // d x n, orthonormal columns

  int d() const { return static_cast<int>(base.size()); }
  int n() const { return static_cast<int>(frame.cols()); }

  Vec project(const Eigen::Ref<const Vec>& x) const {
    return base + frame * (frame.transpose() * (x - base));
  }
  double distance(const Eigen::Ref<const Vec>& x) const {
    return (x - project(x)).norm();
  }
  // Orthonormal basis of the normal space (d x (d-n)).
  Mat normal_frame() const;

  // Frame Gram must equal the identity to 1e-10.
  void validate() const;
};

// Plane through p spanned by the given (not necessarily orthonormal)
// directions; QR re-orthonormalization.
Plane make_plane(const Vec& base, const Mat& span);

// Weighted total-least-squares plane: through the weighted mean, spanned by
// the top-n eigenvectors of the weighted scatter matrix. Returns the plane
// and the residual scatter sum_{i>n} lambda_i (= sum_k w_k dist(y_k, L)^2).
struct PcaPlane {
  Plane plane;
  double residual = 0.0;        // weighted squared-distance sum
  Vec eigenvalues;              // scatter eigenvalues, descending
  bool degenerate = false;      // fewer points than n+1
};
PcaPlane weighted_pca_plane(const Mat& pts, const std::vector<int>& idx,
                            const Vec& weights, int n);

// Tilt + offset chart around a reference plane: theta holds a (d-n) x n tilt
// block (dimensionless) followed by a (d-n)-vector normal offset in units of
// the supplied length scale.
Plane perturb_plane(const Plane& ref, const Vec& theta, double length_scale);
int plane_param_count(int d, int n);

// c * H^n|L restricted to B, discretized on a regular in-plane grid.
struct FlatMeasure {
  double c = 0.0;
  Plane plane;
  DiscreteMeasure quadrature;  // node weights c * g^n
  double grid_step = 0.0;
};

// Throws ValidationError when the plane misses the ball or g > radius/8.
FlatMeasure discretize_flat(double c, const Plane& plane, const Ball& ball,
                            double grid_step);

// Exact distance from x to the cap L(plane) intersected with ball.
double cap_distance(const Vec& x, const Plane& plane, const Ball& ball);

// Hausdorff distance between two plane caps, by dense sampling of each cap
// against the exact point-to-cap distance of the other.
double cap_hausdorff(const Plane& a, const Plane& b, const Ball& ball,
                     int samples_per_axis = 65);

}  // namespace adflat

#endif  // ADFLAT_PLANE_HPP
