#include "adflat/plane.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace adflat {

void Plane::validate() const {
  Mat gram = frame.transpose() * frame;
  if ((gram - Mat::Identity(n(), n())).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("plane: frame is not orthonormal");
}

Mat Plane::normal_frame() const {
  // Full QR of the frame; trailing columns span the orthogonal complement.
  Eigen::HouseholderQR<Mat> qr(frame);
  Mat q = qr.householderQ();
  return q.rightCols(d() - n());
}

Plane make_plane(const Vec& base, const Mat& span) {
  Eigen::HouseholderQR<Mat> qr(span);
  Mat q = qr.householderQ();
  Plane p;
  p.base = base;
  p.frame = q.leftCols(span.cols());
  // HouseholderQR can flip orientation; irrelevant for a plane, but keep the
  // leading entries positive for deterministic output.
  for (int c = 0; c < p.frame.cols(); ++c) {
    int lead = 0;
    for (int r = 0; r < p.frame.rows(); ++r)
      if (std::abs(p.frame(r, c)) > std::abs(p.frame(lead, c))) lead = r;
    if (p.frame(lead, c) < 0.0) p.frame.col(c) = -p.frame.col(c);
  }
  p.validate();
  return p;
}

PcaPlane weighted_pca_plane(const Mat& pts, const std::vector<int>& idx,
                            const Vec& weights, int n) {
  const int d = static_cast<int>(pts.rows());
  PcaPlane out;
  if (static_cast<int>(idx.size()) < n + 1) {
    out.degenerate = true;
    Vec base = idx.empty() ? Vec::Zero(d) : Vec(pts.col(idx[0]));
    Mat span = Mat::Zero(d, n);
    for (int a = 0; a < n; ++a) span(a, a) = 1.0;
    out.plane = make_plane(base, span);
    out.eigenvalues = Vec::Zero(d);
    return out;
  }

  double wsum = 0.0;
  Vec mean = Vec::Zero(d);
  for (int i : idx) {
    mean += weights(i) * pts.col(i);
    wsum += weights(i);
  }
  mean /= wsum;

  Mat scatter = Mat::Zero(d, d);
  for (int i : idx) {
    Vec c = pts.col(i) - mean;
    scatter.noalias() += weights(i) * (c * c.transpose());
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(scatter);
  if (es.info() != Eigen::Success)
    throw Error("weighted_pca_plane: eigendecomposition failed");
  // Ascending from Eigen; re-order descending.
  Vec evals(d);
  Mat evecs(d, d);
  for (int a = 0; a < d; ++a) {
    evals(a) = es.eigenvalues()(d - 1 - a);
    evecs.col(a) = es.eigenvectors().col(d - 1 - a);
  }
  out.plane = make_plane(mean, evecs.leftCols(n));
  out.eigenvalues = evals;
  out.residual = 0.0;
  for (int a = n; a < d; ++a) out.residual += std::max(0.0, evals(a));
  return out;
}

int plane_param_count(int d, int n) { return (d - n) * (n + 1); }

Plane perturb_plane(const Plane& ref, const Vec& theta, double length_scale) {
  const int d = ref.d();
  const int n = ref.n();
  const int codim = d - n;
  Mat normals = ref.normal_frame();

  Mat tilt(codim, n);
  for (int r = 0; r < codim; ++r)
    for (int c = 0; c < n; ++c) tilt(r, c) = theta(r * n + c);
  Vec offset(codim);
  for (int r = 0; r < codim; ++r) offset(r) = theta(codim * n + r);

  Mat span = ref.frame + normals * tilt;
  Vec base = ref.base + normals * (offset * length_scale);
  return make_plane(base, span);
}

FlatMeasure discretize_flat(double c, const Plane& plane, const Ball& ball,
                            double grid_step) {
  if (!(grid_step > 0.0) || grid_step > ball.radius / 8.0 + 1e-15)
    throw ValidationError("discretize_flat: need 0 < g <= radius/8");
  if (c < 0.0) throw ValidationError("discretize_flat: c must be >= 0");
  const int n = plane.n();
  Vec q = plane.project(ball.center);
  double off = (q - ball.center).norm();
  if (off > ball.radius)
    throw ValidationError("discretize_flat: plane does not intersect the ball");
  double chord = std::sqrt(std::max(0.0, ball.radius * ball.radius - off * off));

  long long span = static_cast<long long>(std::floor(chord / grid_step)) + 1;
  std::vector<long long> cur(n, -span);
  std::vector<Vec> nodes;
  double r2 = ball.radius * ball.radius;
  for (;;) {
    Vec u(n);
    for (int a = 0; a < n; ++a) u(a) = cur[a] * grid_step;
    Vec x = q + plane.frame * u;
    if ((x - ball.center).squaredNorm() <= r2) nodes.push_back(std::move(x));
    int a = n - 1;
    while (a >= 0) {
      if (++cur[a] <= span) break;
      cur[a] = -span;
      --a;
    }
    if (a < 0) break;
  }
  if (nodes.empty())
    throw ValidationError("discretize_flat: no quadrature node inside the ball");

  FlatMeasure fm;
  fm.c = c;
  fm.plane = plane;
  fm.grid_step = grid_step;
  DiscreteMeasure& qd = fm.quadrature;
  qd.d = plane.d();
  qd.n = n;
  qd.points.resize(plane.d(), nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) qd.points.col(i) = nodes[i];
  double w = c * pow_int(grid_step, n);
  qd.weights = Vec::Constant(nodes.size(), std::max(w, 0.0));
  qd.h = grid_step;
  qd.label = "flat_quadrature(c=" + format_double(c) + ",g=" +
             format_double(grid_step) + ")";
  return fm;
}

double cap_distance(const Vec& x, const Plane& plane, const Ball& ball) {
  Vec q = plane.project(ball.center);
  double off = (q - ball.center).norm();
  double rc2 = ball.radius * ball.radius - off * off;
  if (rc2 < 0.0) return std::numeric_limits<double>::infinity();
  double rc = std::sqrt(rc2);
  Vec y = plane.project(x);
  Vec delta = y - q;
  double dn = delta.norm();
  Vec closest = dn <= rc ? y : Vec(q + delta * (rc / dn));
  return (x - closest).norm();
}

double cap_hausdorff(const Plane& a, const Plane& b, const Ball& ball,
                     int samples_per_axis) {
  const int n = a.n();
  auto one_side = [&](const Plane& from, const Plane& to) {
    Vec q = from.project(ball.center);
    double off = (q - ball.center).norm();
    double rc2 = ball.radius * ball.radius - off * off;
    if (rc2 < 0.0) return std::numeric_limits<double>::infinity();
    double rc = std::sqrt(rc2);
    double worst = 0.0;
    std::vector<int> cur(n, 0);
    for (;;) {
      Vec u(n);
      for (int t = 0; t < n; ++t)
        u(t) = rc * (-1.0 + 2.0 * cur[t] / double(samples_per_axis - 1));
      if (u.norm() <= rc) {
        Vec x = q + from.frame * u;
        worst = std::max(worst, cap_distance(x, to, ball));
      }
      int t = n - 1;
      while (t >= 0) {
        if (++cur[t] < samples_per_axis) break;
        cur[t] = 0;
        --t;
      }
      if (t < 0) break;
    }
    // Boundary ring: the extremes usually realize the Hausdorff distance.
    int ring = std::max(4 * samples_per_axis, 16);
    if (n == 1) {
      for (double s : {-rc, rc}) {
        Vec x = q + from.frame * Vec::Constant(1, s);
        worst = std::max(worst, cap_distance(x, to, ball));
      }
    } else if (n == 2) {
      for (int k = 0; k < ring; ++k) {
        double ang = 2.0 * M_PI * k / ring;
        Vec u(2);
        u << rc * std::cos(ang), rc * std::sin(ang);
        Vec x = q + from.frame * u;
        worst = std::max(worst, cap_distance(x, to, ball));
      }
    }
    return worst;
  };
  return std::max(one_side(a, b), one_side(b, a));
}

}  // namespace adflat
