#include "adflat/bl_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace adflat {

BlProblem::BlProblem(const Mat& support, const Ball& ball)
    : V_(static_cast<int>(support.cols())) {
  dist_.resize(V_, V_);
  for (int i = 0; i < V_; ++i) {
    dist_(i, i) = 0.0;
    for (int k = i + 1; k < V_; ++k) {
      double d = (support.col(i) - support.col(k)).norm();
      dist_(i, k) = d;
      dist_(k, i) = d;
    }
  }
  bnd_.resize(V_);
  for (int i = 0; i < V_; ++i) {
    double b = ball.radius - (support.col(i) - ball.center).norm();
    if (b < -1e-12 * std::max(1.0, ball.radius))
      throw ValidationError("BlProblem: support point outside the ball");
    bnd_(i) = std::max(b, 0.0);
  }
  potential_ = Vec::Zero(V_ + 1);
  flow_ = Mat::Zero(V_ + 1, V_ + 1);
}

BlProblem::Solution BlProblem::solve(const Vec& supply) {
  const int V = V_;
  const int B = V_;  // boundary node id
  if (supply.size() != V)
    throw ValidationError("BlProblem::solve: supply size mismatch");

  Vec excess(V + 1);
  excess.head(V) = supply;
  excess(B) = -supply.sum();
  flow_.setZero();

  double total_abs = supply.cwiseAbs().sum() + std::abs(excess(B));
  double tol = 1e-13 * std::max(1.0, total_abs);

  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> dist(V + 1);
  std::vector<int> parent(V + 1);
  std::vector<char> parent_res(V + 1);
  std::vector<char> settled(V + 1);

  using Item = std::pair<double, int>;
  Solution sol;
  sol.f = Vec::Zero(V);

  for (;;) {
    // Any remaining source?
    int src_exists = -1;
    for (int u = 0; u <= V; ++u)
      if (excess(u) > tol) {
        src_exists = u;
        break;
      }
    if (src_exists < 0) break;

    // Multi-source Dijkstra on reduced costs until a deficit node settles.
    std::fill(dist.begin(), dist.end(), INF);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_res.begin(), parent_res.end(), 0);
    std::fill(settled.begin(), settled.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int u = 0; u <= V; ++u)
      if (excess(u) > tol) {
        dist[u] = 0.0;
        heap.push({0.0, u});
      }

    int target = -1;
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (settled[u] || du > dist[u]) continue;
      settled[u] = 1;
      if (excess(u) < -tol) {
        target = u;
        break;
      }
      for (int v = 0; v <= V; ++v) {
        if (v == u || settled[v]) continue;
        double c = cost(u, v);
        bool res = flow_(v, u) > 0.0;
        double rc = (res ? -c : c) + potential_(u) - potential_(v);
        if (rc < 0.0) rc = 0.0;  // FP guard; invariant keeps rc >= 0
        double nd = du + rc;
        if (nd < dist[v]) {
          dist[v] = nd;
          parent[v] = u;
          parent_res[v] = res;
          heap.push({nd, v});
        }
      }
    }
    if (target < 0)
      throw Error("BlProblem: no augmenting path (internal error)");

    double dt = dist[target];
    for (int u = 0; u <= V; ++u)
      potential_(u) += std::min(dist[u], dt);

    // Path capacity: infinite on forward arcs, existing flow on residuals.
    int s = target;
    double delta = -excess(target);
    while (parent[s] >= 0) {
      int p = parent[s];
      if (parent_res[s]) delta = std::min(delta, flow_(s, p));
      s = p;
    }
    delta = std::min(delta, excess(s));

    int v = target;
    while (parent[v] >= 0) {
      int u = parent[v];
      if (parent_res[v])
        flow_(v, u) -= delta;
      else
        flow_(u, v) += delta;
      v = u;
    }
    excess(s) -= delta;
    excess(target) += delta;
    ++sol.augmentations;
  }

  // Dual solution: f_i = pi_B - pi_i, feasible by the rc >= 0 invariant.
  for (int i = 0; i < V; ++i) {
    double f = potential_(B) - potential_(i);
    f = std::min(f, bnd_(i));
    f = std::max(f, -bnd_(i));
    sol.f(i) = f;
  }
  sol.value = supply.dot(sol.f);
  double pc = 0.0;
  for (int u = 0; u <= V; ++u)
    for (int v = 0; v <= V; ++v)
      if (flow_(u, v) > 0.0) pc += flow_(u, v) * cost(u, v);
  sol.primal_cost = pc;
  return sol;
}

namespace {

struct LexLess {
  const Mat* pts;
  bool operator()(int a, int b) const {
    for (int r = 0; r < pts->rows(); ++r) {
      double x = (*pts)(r, a), y = (*pts)(r, b);
      if (x < y) return true;
      if (x > y) return false;
    }
    return false;
  }
};

}  // namespace

BlResult bl_distance(const DiscreteMeasure& sigma, const DiscreteMeasure& nu,
                     const Ball& ball, const BlOptions& opts) {
  if (sigma.d != nu.d)
    throw ValidationError("bl_distance: ambient dimensions differ");
  const int d = sigma.d;

  // Merge coincident points; points outside B are dropped (f vanishes
  // there, so they cannot contribute).
  std::map<std::vector<double>, double> merged;
  int dropped = 0;
  auto add = [&](const Mat& pts, const Vec& w, double sign) {
    for (int i = 0; i < pts.cols(); ++i) {
      if ((pts.col(i) - ball.center).norm() > ball.radius * (1.0 + 1e-12)) {
        ++dropped;
        continue;
      }
      std::vector<double> key(pts.col(i).data(), pts.col(i).data() + d);
      merged[key] += sign * w(i);
    }
  };
  add(sigma.points, sigma.weights, +1.0);
  add(nu.points, nu.weights, -1.0);

  const int M = static_cast<int>(merged.size());
  if (M > opts.support_cap)
    throw ValidationError("bl_distance: combined support " +
                          std::to_string(M) + " exceeds cap " +
                          std::to_string(opts.support_cap) +
                          "; subsample first");

  BlResult res;
  res.dropped = dropped;
  if (M == 0) {
    res.value = 0.0;
    return res;
  }
  res.support.resize(d, M);
  res.net_supply.resize(M);
  int col = 0;
  for (const auto& [key, s] : merged) {
    for (int r = 0; r < d; ++r) res.support(r, col) = key[r];
    res.net_supply(col) = s;
    ++col;
  }

  // Sign canonicalization: the first nonzero supply is made positive, so the
  // (sigma, nu) and (nu, sigma) computations coincide bit for bit.
  bool flipped = false;
  for (int i = 0; i < M; ++i) {
    if (res.net_supply(i) != 0.0) {
      flipped = res.net_supply(i) < 0.0;
      break;
    }
  }
  Vec supply = flipped ? Vec(-res.net_supply) : res.net_supply;

  BlProblem problem(res.support, ball);
  auto sol = problem.solve(supply);
  res.value = sol.value;
  res.f = flipped ? Vec(-sol.f) : sol.f;
  return res;
}

}  // namespace adflat
