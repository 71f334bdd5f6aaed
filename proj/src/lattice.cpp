#include "adflat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace adflat {

namespace {

double subset_diameter(const Mat& pts, const std::vector<int>& idx) {
  const std::size_t N = idx.size();
  if (N < 2) return 0.0;
  if (N <= 512) {
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = i + 1; k < N; ++k)
        best = std::max(best,
                        (pts.col(idx[i]) - pts.col(idx[k])).squaredNorm());
    return std::sqrt(best);
  }
  auto farthest = [&](int from) {
    int arg = from;
    double best = -1.0;
    for (int i : idx) {
      double d2 = (pts.col(i) - pts.col(from)).squaredNorm();
      if (d2 > best) {
        best = d2;
        arg = i;
      }
    }
    return arg;
  };
  int a = farthest(idx[0]);
  int b = farthest(a);
  double best = (pts.col(a) - pts.col(b)).squaredNorm();
  for (int i : idx) {
    best = std::max(best, (pts.col(i) - pts.col(a)).squaredNorm());
    best = std::max(best, (pts.col(i) - pts.col(b)).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

int max_admissible_depth(const DiscreteMeasure& m) {
  if (m.size() < 2) return 30;
  double diam = m.diameter();
  double limit = diam / (4.0 * m.h);  // need 2^{-j} >= 4h / scale_unit
  if (limit < 1.0) return 0;
  return static_cast<int>(std::floor(std::log2(limit) + 1e-12));
}

Lattice build_lattice(const DiscreteMeasure& m, int depth) {
  m.validate();
  if (depth < 0) throw ValidationError("build_lattice: depth must be >= 0");
  int admissible = max_admissible_depth(m);
  if (depth > admissible)
    throw ValidationError("build_lattice: depth " + std::to_string(depth) +
                          " violates the 4h floor; maximal admissible depth is " +
                          std::to_string(admissible));

  const int N = m.size();
  Lattice lat;
  lat.j_min = 0;
  lat.j_max = depth;
  double diam = m.diameter();
  lat.scale_unit = diam > 0.0 ? diam : 1.0;
  lat.origin = m.points.rowwise().minCoeff();
  lat.npts = (m.points.colwise() - lat.origin) / lat.scale_unit;
  lat.generations.assign(depth + 1, {});
  lat.cube_of_point.assign(depth + 1, std::vector<int>(N, -1));

  // Root: one cube holding everything, centered at the support point nearest
  // the weighted centroid.
  Vec centroid = Vec::Zero(m.d);
  for (int i = 0; i < N; ++i) centroid += m.weights(i) * lat.npts.col(i);
  centroid /= m.total_mass();
  int root_center = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    double d2 = (lat.npts.col(i) - centroid).squaredNorm();
    if (d2 < best) {
      best = d2;
      root_center = i;
    }
  }
  {
    DyadicCube root;
    root.id = 0;
    root.j = 0;
    root.z_index = root_center;
    root.members.resize(N);
    for (int i = 0; i < N; ++i) root.members[i] = i;
    root.mass = m.total_mass();
    root.diam_norm = diam > 0.0 ? 1.0 : 0.0;
    lat.cubes.push_back(std::move(root));
    lat.generations[0] = {0};
    for (int i = 0; i < N; ++i) lat.cube_of_point[0][i] = 0;
  }

  for (int j = 1; j <= depth; ++j) {
    double r = dyadic(j);
    const auto& parent_of = lat.cube_of_point[j - 1];

    // Net: parent centers first (they are 2^{-j+1}-separated already), then
    // remaining points in ascending index order at separation 2^{-j}.
    std::vector<int> net_point;   // support index of each net entry
    std::vector<int> net_parent;  // parent cube id of each net entry
    std::vector<char> in_net(N, 0);
    for (int pc : lat.generations[j - 1]) {
      int zi = lat.cubes[pc].z_index;
      net_point.push_back(zi);
      net_parent.push_back(pc);
      in_net[zi] = 1;
    }
    // Incremental cell hash over the growing net (GridIndex snapshots its
    // subset, so it cannot be used here).
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    auto cell_key = [&](const Eigen::Ref<const Vec>& x) {
      std::uint64_t hsh = 0xcbf29ce484222325ull;
      for (int a = 0; a < m.d; ++a) {
        long long c = static_cast<long long>(std::floor(x(a) / r));
        hsh = fnv1a64(&c, sizeof(c), hsh);
      }
      return hsh;
    };
    auto separated = [&](const Eigen::Ref<const Vec>& x) {
      std::vector<long long> lo(m.d), hi(m.d), cur(m.d);
      for (int a = 0; a < m.d; ++a) {
        lo[a] = static_cast<long long>(std::floor((x(a) - r) / r));
        hi[a] = static_cast<long long>(std::floor((x(a) + r) / r));
        cur[a] = lo[a];
      }
      for (;;) {
        std::uint64_t hsh = 0xcbf29ce484222325ull;
        for (int a = 0; a < m.d; ++a) hsh = fnv1a64(&cur[a], sizeof(long long), hsh);
        auto it = cells.find(hsh);
        if (it != cells.end()) {
          for (int e : it->second)
            if ((lat.npts.col(net_point[e]) - x).norm() < r) return false;
        }
        int a = m.d - 1;
        while (a >= 0) {
          if (++cur[a] <= hi[a]) break;
          cur[a] = lo[a];
          --a;
        }
        if (a < 0) break;
      }
      return true;
    };
    for (std::size_t e = 0; e < net_point.size(); ++e)
      cells[cell_key(lat.npts.col(net_point[e]))].push_back(static_cast<int>(e));

    for (int i = 0; i < N; ++i) {
      if (in_net[i]) continue;
      if (separated(lat.npts.col(i))) {
        int e = static_cast<int>(net_point.size());
        net_point.push_back(i);
        net_parent.push_back(parent_of[i]);
        in_net[i] = 1;
        cells[cell_key(lat.npts.col(i))].push_back(e);
      }
    }

    // Net entries of each parent, in global net order.
    std::vector<std::vector<int>> parent_entries(lat.cubes.size());
    for (std::size_t e = 0; e < net_point.size(); ++e)
      parent_entries[net_parent[e]].push_back(static_cast<int>(e));

    // Assign each point to the nearest net point inside its parent; ties go
    // to the lower global net index.
    std::vector<int> assigned(N, -1);
    for (int i = 0; i < N; ++i) {
      const auto& cand = parent_entries[parent_of[i]];
      int best_e = -1;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int e : cand) {
        double d2 = (lat.npts.col(net_point[e]) - lat.npts.col(i)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best_e = e;
        }
      }
      assigned[i] = best_e;
    }

    // Materialize cubes in net order.
    int first_id = static_cast<int>(lat.cubes.size());
    for (std::size_t e = 0; e < net_point.size(); ++e) {
      DyadicCube q;
      q.id = first_id + static_cast<int>(e);
      q.j = j;
      q.z_index = net_point[e];
      q.parent_id = net_parent[e];
      lat.cubes.push_back(std::move(q));
      lat.generations[j].push_back(first_id + static_cast<int>(e));
      lat.cubes[net_parent[e]].child_ids.push_back(first_id + static_cast<int>(e));
    }
    for (int i = 0; i < N; ++i) {
      int id = first_id + assigned[i];
      lat.cubes[id].members.push_back(i);
      lat.cubes[id].mass += m.weights(i);
      lat.cube_of_point[j][i] = id;
    }
    for (std::size_t e = 0; e < net_point.size(); ++e) {
      DyadicCube& q = lat.cubes[first_id + static_cast<int>(e)];
      q.diam_norm = subset_diameter(lat.npts, q.members);
    }
  }
  return lat;
}

Ball cube_ball(const Lattice& lat, int cube_id, bool diameter_variant) {
  const DyadicCube& q = lat.cube(cube_id);
  double radius = 3.0 * (diameter_variant ? q.diam_norm * lat.scale_unit
                                          : lat.side_phys(q.j));
  return Ball{lat.center_phys(q), radius};
}

std::vector<int> dilate(const Lattice& lat, int cube_id, double lambda) {
  if (lambda < 1.0) throw ValidationError("dilate: lambda must be >= 1");
  const DyadicCube& q = lat.cube(cube_id);
  if (lambda == 1.0) return q.members;
  double reach = (lambda - 1.0) * lat.side_norm(q.j);
  GridIndex all_index(lat.npts, reach);
  std::vector<char> inside(lat.point_count(), 0);
  for (int i : q.members) inside[i] = 1;
  std::vector<int> hits;
  for (int i : q.members) {
    hits.clear();
    all_index.query_ball_append(lat.npts.col(i), reach, hits);
    for (int k : hits) inside[k] = 1;
  }
  std::vector<int> out;
  for (int i = 0; i < lat.point_count(); ++i)
    if (inside[i]) out.push_back(i);
  return out;
}

std::vector<int> neighbors(const Lattice& lat, int cube_id) {
  const DyadicCube& s = lat.cube(cube_id);
  double reach = lat.side_norm(s.j);
  const auto& owner = lat.cube_of_point[s.j];
  GridIndex idx(lat.npts, reach);
  std::vector<char> flagged(lat.cubes.size(), 0);
  std::vector<int> out;
  std::vector<int> hits;
  for (int i : s.members) {
    hits.clear();
    idx.query_ball_append(lat.npts.col(i), reach, hits);
    for (int k : hits) {
      int t = owner[k];
      if (t != cube_id && !flagged[t]) {
        flagged[t] = 1;
        out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LatticeAxiomReport verify_lattice(const Lattice& lat, const DiscreteMeasure& m) {
  LatticeAxiomReport rep;
  rep.cube_count = static_cast<int>(lat.cubes.size());
  const int N = lat.point_count();
  double total = m.total_mass();

  // (i) partition per generation
  for (int j = 0; j <= lat.j_max; ++j) {
    std::vector<int> seen(N, 0);
    for (int id : lat.generations[j])
      for (int i : lat.cubes[id].members) seen[i]++;
    for (int i = 0; i < N; ++i)
      if (seen[i] != 1) {
        rep.partition_ok = false;
        rep.violation = "partition violation at generation " +
                        std::to_string(j) + ", point " + std::to_string(i);
        throw ValidationError("verify_lattice: " + rep.violation);
      }
  }
  // (ii) nesting
  for (const auto& q : lat.cubes) {
    if (q.parent_id < 0) continue;
    const auto& par = lat.cubes[q.parent_id].members;
    for (int i : q.members) {
      if (!std::binary_search(par.begin(), par.end(), i)) {
        rep.nesting_ok = false;
        rep.violation = "nesting violation at cube " + std::to_string(q.id);
        throw ValidationError("verify_lattice: " + rep.violation);
      }
    }
  }

  // (iii)/(iv) constants
  rep.diam_ratio_min = std::numeric_limits<double>::infinity();
  rep.diam_ratio_max = 0.0;
  rep.mass_ratio_min = std::numeric_limits<double>::infinity();
  rep.mass_ratio_max = 0.0;
  rep.separation_min = 1.0;
  for (const auto& q : lat.cubes) {
    double side = lat.side_norm(q.j);
    if (q.j > 0 || lat.j_max == 0) {
      rep.diam_ratio_min = std::min(rep.diam_ratio_min, q.diam_norm / side);
      rep.diam_ratio_max = std::max(rep.diam_ratio_max, q.diam_norm / side);
    }
    double mr = q.mass / (total * pow_int(side, m.n));
    rep.mass_ratio_min = std::min(rep.mass_ratio_min, mr);
    rep.mass_ratio_max = std::max(rep.mass_ratio_max, mr);
  }
  if (N > 1) {
    for (int j = 1; j <= lat.j_max; ++j) {
      double side = lat.side_norm(j);
      GridIndex idx(lat.npts, side);
      const auto& owner = lat.cube_of_point[j];
      for (int id : lat.generations[j]) {
        const DyadicCube& q = lat.cubes[id];
        std::vector<int> hits;
        idx.query_ball_append(lat.npts.col(q.z_index), side, hits);
        double best = side;  // nothing foreign within 2^{-j}: cap ratio at 1
        for (int k : hits)
          if (owner[k] != id)
            best = std::min(best,
                            (lat.npts.col(k) - lat.npts.col(q.z_index)).norm());
        rep.separation_min = std::min(rep.separation_min, best / side);
      }
    }
  }
  return rep;
}

std::string export_lattice_json(const Lattice& lat, bool with_members) {
  nlohmann::json j;
  j["scale_unit"] = lat.scale_unit;
  j["j_min"] = lat.j_min;
  j["j_max"] = lat.j_max;
  nlohmann::json cubes = nlohmann::json::array();
  for (const auto& q : lat.cubes) {
    nlohmann::json c;
    c["id"] = q.id;
    c["j"] = q.j;
    Vec z = lat.center_phys(q);
    c["center"] = std::vector<double>(z.data(), z.data() + z.size());
    c["l"] = lat.side_phys(q.j);
    c["mass"] = q.mass;
    if (q.parent_id >= 0) c["parent_id"] = q.parent_id;
    c["child_ids"] = q.child_ids;
    c["member_count"] = q.members.size();
    if (with_members) c["members"] = q.members;
    cubes.push_back(std::move(c));
  }
  j["cubes"] = std::move(cubes);
  return j.dump(2);
}

}  // namespace adflat
