#ifndef ADFLAT_LATTICE_HPP
#define ADFLAT_LATTICE_HPP

#include <optional>
#include <string>
#include <vector>

#include "adflat/measure.hpp"
#include "adflat/spatial.hpp"

namespace adflat {

// A Christ-David "cube": a set of support-point indices together with its
// generation. Side lengths are exact powers of two in normalized units
// (support diameter = 1); physical lengths are recovered via scale_unit.
struct DyadicCube {
  int id = -1;
  int j = 0;                  // generation J(Q); side 2^{-j} normalized
  int z_index = -1;           // center z_Q, index into the point list
  std::vector<int> members;   // ascending support-point indices
  int parent_id = -1;
  std::vector<int> child_ids;
  double mass = 0.0;          // sum of member weights (physical H^n units)
  double diam_norm = 0.0;     // d(Q) in normalized units
};

struct Lattice {
  std::vector<DyadicCube> cubes;               // indexed by id
  std::vector<std::vector<int>> generations;   // j -> cube ids
  int j_min = 0;
  int j_max = 0;
  double scale_unit = 1.0;   // physical length of one normalized unit
  Vec origin;                // translation removed during normalization
  Mat npts;                  // normalized support points (d x N)
  std::vector<std::vector<int>> cube_of_point;  // [j][point] -> cube id

  int depth() const { return j_max; }
  double side_norm(int j) const { return dyadic(j); }
  double side_phys(int j) const { return dyadic(j) * scale_unit; }

  Vec center_phys(const DyadicCube& q) const {
    return origin + scale_unit * npts.col(q.z_index);
  }
  const DyadicCube& cube(int id) const { return cubes.at(id); }
  int point_count() const { return static_cast<int>(npts.cols()); }
};

// Maximal depth admitted by the 4h floor (cubes never finer than four
// sample spacings).
int max_admissible_depth(const DiscreteMeasure& m);

// Greedy-net Christ-David construction. Partition and nesting are exact by
// construction; the (iii)/(iv) constants are reported by verify_lattice.
Lattice build_lattice(const DiscreteMeasure& m, int depth);

// B_Q = B(z_Q, 3 l(Q)), following the convention used by the lemmas this
// project checks. The B(z_Q, 3 d(Q)) variant is exposed behind a flag.
Ball cube_ball(const Lattice& lat, int cube_id, bool diameter_variant = false);

// lambda Q = members within (lambda - 1) l(Q) of Q. lambda >= 1.
std::vector<int> dilate(const Lattice& lat, int cube_id, double lambda);

// Same-generation cubes T != S with dist(S, T) <= 2^{-m}.
std::vector<int> neighbors(const Lattice& lat, int cube_id);

struct LatticeAxiomReport {
  bool partition_ok = true;
  bool nesting_ok = true;
  // min/max over non-root cubes of d(Q) / 2^{-j}
  double diam_ratio_min = 0.0, diam_ratio_max = 0.0;
  // min/max of mu(Q) / (mu(E) 2^{-jn})
  double mass_ratio_min = 0.0, mass_ratio_max = 0.0;
  // min over cubes of dist(z_Q, E \ Q) / 2^{-j}, capped at 1
  double separation_min = 0.0;
  int cube_count = 0;
  std::string violation;  // first partition/nesting violation, if any
};

// Report-only, except that a partition/nesting violation is a construction
// bug and throws.
LatticeAxiomReport verify_lattice(const Lattice& lat,
                                  const DiscreteMeasure& m);

std::string export_lattice_json(const Lattice& lat, bool with_members = false);

}  // namespace adflat

#endif  // ADFLAT_LATTICE_HPP
