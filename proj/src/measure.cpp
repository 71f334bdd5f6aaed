#include "adflat/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace adflat {

double DiscreteMeasure::diameter() const {
  const int N = size();
  if (N < 2) return 0.0;
  if (N <= 2048) {
    double best = 0.0;
    for (int i = 0; i < N; ++i)
      for (int k = i + 1; k < N; ++k)
        best = std::max(best, (points.col(i) - points.col(k)).squaredNorm());
    return std::sqrt(best);
  }
  // Double sweep to find a far pair, then one exact pass against both ends.
  auto farthest = [&](int from) {
    int arg = from;
    double best = -1.0;
    for (int i = 0; i < N; ++i) {
      double d2 = (points.col(i) - points.col(from)).squaredNorm();
      if (d2 > best) {
        best = d2;
        arg = i;
      }
    }
    return arg;
  };
  int a = farthest(0);
  int b = farthest(a);
  double best = (points.col(a) - points.col(b)).squaredNorm();
  for (int i = 0; i < N; ++i) {
    best = std::max(best, (points.col(i) - points.col(a)).squaredNorm());
    best = std::max(best, (points.col(i) - points.col(b)).squaredNorm());
  }
  return std::sqrt(best);
}

double DiscreteMeasure::ball_mass(const Ball& b) const {
  double r2 = b.radius * b.radius;
  double mass = 0.0;
  for (int i = 0; i < size(); ++i)
    if ((points.col(i) - b.center).squaredNorm() <= r2) mass += weights(i);
  return mass;
}

void DiscreteMeasure::validate() const {
  if (d <= 0) throw ValidationError("measure: ambient dimension must be positive");
  if (n <= 0 || n > d)
    throw ValidationError("measure: intrinsic dimension must satisfy 0 < n <= d");
  if (size() < 1) throw ValidationError("measure: needs at least one point");
  if (points.rows() != d)
    throw ValidationError("measure: point rows do not match ambient dimension");
  if (weights.size() != size())
    throw ValidationError("measure: weight count does not match point count");
  for (int i = 0; i < size(); ++i) {
    if (!(weights(i) > 0.0))
      throw ValidationError("measure: weight " + std::to_string(i) +
                            " is not positive");
    if (!points.col(i).allFinite())
      throw ValidationError("measure: point " + std::to_string(i) +
                            " has non-finite coordinates");
  }
  if (!(h > 0.0)) throw ValidationError("measure: resolution h must be positive");
  if (!std::isfinite(total_mass()) || !(total_mass() > 0.0))
    throw ValidationError("measure: total mass must be finite and positive");
  if (size() >= 2 && h > diameter() * (1.0 + 1e-12))
    throw ValidationError("measure: resolution h exceeds the point-set diameter");
}

std::uint64_t DiscreteMeasure::content_hash() const {
  std::uint64_t hsh = fnv1a64(&d, sizeof(d));
  hsh = fnv1a64(&n, sizeof(n), hsh);
  hsh = fnv1a64(&h, sizeof(h), hsh);
  hsh = fnv1a64(points.data(), sizeof(double) * points.size(), hsh);
  hsh = fnv1a64(weights.data(), sizeof(double) * weights.size(), hsh);
  return hsh;
}

namespace {

Vec grid_node(const Vec& lo, double step, const std::vector<int>& idx) {
  Vec x(static_cast<int>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    x(static_cast<int>(a)) = lo(static_cast<int>(a)) + (idx[a] + 0.5) * step;
  return x;
}

// Iterates the n-dim index grid [0, res)^n in row-major order.
bool advance_index(std::vector<int>& idx, int res) {
  for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
    if (++idx[a] < res) return true;
    idx[a] = 0;
  }
  return false;
}

DiscreteMeasure generate_flat_patch(const FlatPatchSpec& spec) {
  if (spec.resolution < 2)
    throw ValidationError("flat_patch: grid resolution must be >= 2 per axis");
  if (spec.n <= 0 || spec.n > spec.d)
    throw ValidationError("flat_patch: need 0 < n <= d");
  Vec base = spec.base.size() == spec.d ? spec.base : Vec::Zero(spec.d);
  Mat frame;
  if (spec.frame.rows() == spec.d && spec.frame.cols() == spec.n) {
    frame = spec.frame;
  } else {
    frame = Mat::Zero(spec.d, spec.n);
    for (int a = 0; a < spec.n; ++a) frame(a, a) = 1.0;
  }
  double step = spec.side / spec.resolution;
  double cellw = spec.c * pow_int(step, spec.n);
  long long count = 1;
  for (int a = 0; a < spec.n; ++a) count *= spec.resolution;

  DiscreteMeasure m;
  m.d = spec.d;
  m.n = spec.n;
  m.points.resize(spec.d, count);
  m.weights = Vec::Constant(count, cellw);
  std::vector<int> idx(spec.n, 0);
  Vec lo = Vec::Zero(spec.n);
  long long col = 0;
  do {
    Vec u = grid_node(lo, step, idx);
    m.points.col(col++) = base + frame * u;
  } while (advance_index(idx, spec.resolution));
  m.h = step;
  m.label = "flat_patch(d=" + std::to_string(spec.d) + ",n=" +
            std::to_string(spec.n) + ",side=" + format_double(spec.side) +
            ",res=" + std::to_string(spec.resolution) + ",c=" +
            format_double(spec.c) + ")";
  m.validate();
  return m;
}

DiscreteMeasure generate_graph(const LipschitzGraphSpec& spec) {
  if (spec.resolution < 2)
    throw ValidationError("lipschitz_graph: grid resolution must be >= 2 per axis");
  if (!spec.graph)
    throw ValidationError("lipschitz_graph: no graph function supplied");
  const int n = spec.n;
  const int d = spec.d;
  const int codim = d - n;
  if (codim < 1) throw ValidationError("lipschitz_graph: need n < d");
  double step = spec.side / spec.resolution;
  double cellvol = pow_int(step, n);

  auto eval_graph = [&](const Vec& x) {
    Vec y = spec.graph(x);
    if (y.size() != codim)
      throw ValidationError("lipschitz_graph: graph function returned wrong dimension");
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "lipschitz_graph: non-finite graph value at (";
      for (int a = 0; a < n; ++a) os << (a ? "," : "") << format_double(x(a));
      os << ")";
      throw ValidationError(os.str());
    }
    return y;
  };

  long long count = 1;
  for (int a = 0; a < n; ++a) count *= spec.resolution;

  DiscreteMeasure m;
  m.d = d;
  m.n = n;
  m.points.resize(d, count);
  m.weights.resize(count);

  std::vector<int> idx(n, 0);
  Vec lo = Vec::Zero(n);
  long long col = 0;
  do {
    Vec x = grid_node(lo, step, idx);
    Vec y = eval_graph(x);

    // grad A by central differences at the grid spacing; one-sided where the
    // stencil would leave the node range.
    Mat grad(codim, n);
    for (int a = 0; a < n; ++a) {
      Vec xp = x, xm = x;
      double denom;
      if (idx[a] == 0) {
        xp(a) += step;
        denom = step;
      } else if (idx[a] == spec.resolution - 1) {
        xm(a) -= step;
        denom = step;
      } else {
        xp(a) += step;
        xm(a) -= step;
        denom = 2.0 * step;
      }
      grad.col(a) = (eval_graph(xp) - eval_graph(xm)) / denom;
    }
    Mat gram = Mat::Identity(n, n) + grad.transpose() * grad;
    double jac = std::sqrt(gram.determinant());

    Vec p(d);
    p.head(n) = x;
    p.tail(codim) = y;
    double rho = 1.0;
    if (spec.density) {
      rho = spec.density(p);
      if (!std::isfinite(rho) || rho < 0.0) {
        std::ostringstream os;
        os << "lipschitz_graph: invalid density value at (";
        for (int a = 0; a < n; ++a) os << (a ? "," : "") << format_double(x(a));
        os << ")";
        throw ValidationError(os.str());
      }
    }
    m.points.col(col) = p;
    m.weights(col) = rho * jac * cellvol;
    ++col;
  } while (advance_index(idx, spec.resolution));

  m.h = step;
  m.label = "lipschitz_graph(d=" + std::to_string(d) + ",n=" +
            std::to_string(n) + ",side=" + format_double(spec.side) + ",res=" +
            std::to_string(spec.resolution) +
            (spec.family.empty() ? "" : ",A=" + spec.family) + ")";
  m.validate();
  return m;
}

DiscreteMeasure generate_cantor4(const Cantor4Spec& spec) {
  if (spec.generation < 0)
    throw ValidationError("cantor4: generation must be >= 0");
  if (spec.d < 2) throw ValidationError("cantor4: needs ambient dimension >= 2");
  const int N = spec.generation;
  long long count = 1;
  for (int k = 0; k < N; ++k) count *= 4;

  DiscreteMeasure m;
  m.d = spec.d;
  m.n = 1;
  m.points = Mat::Zero(spec.d, count);
  m.weights = Vec::Constant(count, spec.side / static_cast<double>(count));

  // Corner expansion in quadrant order (0,0),(1,0),(0,1),(1,1); point i's
  // base-4 digits give its cell path from coarse to fine.
  for (long long i = 0; i < count; ++i) {
    double x = 0.0, y = 0.0;
    long long rest = i;
    double cell = spec.side;
    for (int k = 0; k < N; ++k) {
      long long digits = 1;
      for (int t = k + 1; t < N; ++t) digits *= 4;
      int q = static_cast<int>((rest / digits) % 4);
      double off = 0.75 * cell;
      if (q & 1) x += off;
      if (q & 2) y += off;
      cell *= 0.25;
    }
    m.points(0, i) = x;
    m.points(1, i) = y;
  }
  m.h = spec.side * pow_int(0.25, N);
  m.label = "cantor4(N=" + std::to_string(N) + ",d=" + std::to_string(spec.d) +
            ",side=" + format_double(spec.side) + ")";
  m.validate();
  return m;
}

}  // namespace

DiscreteMeasure generate_measure(const MeasureSpec& spec) {
  return std::visit(
      [](const auto& s) -> DiscreteMeasure {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FlatPatchSpec>)
          return generate_flat_patch(s);
        else if constexpr (std::is_same_v<T, LipschitzGraphSpec>)
          return generate_graph(s);
        else if constexpr (std::is_same_v<T, Cantor4Spec>)
          return generate_cantor4(s);
        else
          return load_measure(s.path);
      },
      spec);
}

LipschitzGraphSpec make_graph_spec(int d, int n, double side, int resolution,
                                   const std::string& family) {
  LipschitzGraphSpec spec;
  spec.d = d;
  spec.n = n;
  spec.side = side;
  spec.resolution = resolution;
  spec.family = family;
  const int codim = d - n;

  std::vector<std::string> parts;
  {
    std::stringstream ss(family);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
  }
  if (parts.empty()) throw ValidationError("graph family: empty id");
  const std::string& kind = parts[0];
  if (kind == "zero") {
    spec.graph = [codim](const Vec&) { return Vec::Zero(codim).eval(); };
  } else if (kind == "const") {
    if (parts.size() != 2) throw ValidationError("graph family const:<v>");
    double v = std::stod(parts[1]);
    spec.graph = [codim, v](const Vec&) {
      Vec y = Vec::Zero(codim);
      y(0) = v;
      return y;
    };
  } else if (kind == "linear") {
    if (parts.size() != 2) throw ValidationError("graph family linear:<slope>");
    double s = std::stod(parts[1]);
    spec.graph = [codim, s](const Vec& x) {
      Vec y = Vec::Zero(codim);
      y(0) = s * x.sum();
      return y;
    };
  } else if (kind == "sine") {
    if (parts.size() != 3) throw ValidationError("graph family sine:<amp>:<freq>");
    double amp = std::stod(parts[1]);
    double freq = std::stod(parts[2]);
    spec.graph = [codim, amp, freq](const Vec& x) {
      Vec y = Vec::Zero(codim);
      y(0) = amp * std::sin(2.0 * M_PI * freq * x(0));
      return y;
    };
  } else {
    throw ValidationError("graph family: unknown id '" + kind + "'");
  }
  return spec;
}

double graph_grad_norm_sq(const LipschitzGraphSpec& spec) {
  const int n = spec.n;
  const int codim = spec.d - spec.n;
  double step = spec.side / spec.resolution;
  double cellvol = pow_int(step, n);
  std::vector<int> idx(n, 0);
  Vec lo = Vec::Zero(n);
  double acc = 0.0;
  do {
    Vec x = grid_node(lo, step, idx);
    Mat grad(codim, n);
    for (int a = 0; a < n; ++a) {
      Vec xp = x, xm = x;
      double denom;
      if (idx[a] == 0) {
        xp(a) += step;
        denom = step;
      } else if (idx[a] == spec.resolution - 1) {
        xm(a) -= step;
        denom = step;
      } else {
        xp(a) += step;
        xm(a) -= step;
        denom = 2.0 * step;
      }
      grad.col(a) = (spec.graph(xp) - spec.graph(xm)) / denom;
    }
    acc += grad.squaredNorm() * cellvol;
  } while (advance_index(idx, spec.resolution));
  return acc;
}

void save_measure(const DiscreteMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_measure: cannot open '" + path + "'");
  out << "RMEAS 1 d=" << m.d << " n=" << m.n << " N=" << m.size()
      << " h=" << format_double(m.h) << "\n";
  if (!m.label.empty()) out << "# " << m.label << "\n";
  for (int i = 0; i < m.size(); ++i) {
    for (int a = 0; a < m.d; ++a) out << format_double(m.points(a, i)) << " ";
    out << format_double(m.weights(i)) << "\n";
  }
  if (!out) throw IoError("save_measure: write failed for '" + path + "'");
}

DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_measure: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw IoError("load_measure: empty file '" + path + "'");

  DiscreteMeasure m;
  long long N = -1;
  {
    std::stringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != "RMEAS" || version != 1)
      throw IoError("load_measure: malformed header line (expected 'RMEAS 1 ...')");
    std::string kv;
    bool have_d = false, have_n = false, have_N = false, have_h = false;
    while (ss >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw IoError("load_measure: malformed header field '" + kv + "'");
      std::string key = kv.substr(0, eq);
      std::string val = kv.substr(eq + 1);
      if (key == "d") {
        m.d = std::stoi(val);
        have_d = true;
      } else if (key == "n") {
        m.n = std::stoi(val);
        have_n = true;
      } else if (key == "N") {
        N = std::stoll(val);
        have_N = true;
      } else if (key == "h") {
        m.h = std::stod(val);
        have_h = true;
      } else {
        throw IoError("load_measure: unknown header field '" + key + "'");
      }
    }
    if (!(have_d && have_n && have_N && have_h))
      throw IoError("load_measure: header missing one of d, n, N, h");
  }
  if (N < 1) throw IoError("load_measure: header N must be >= 1");
  m.points.resize(m.d, N);
  m.weights.resize(N);

  long long row = 0;
  long long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (row >= N)
      throw IoError("load_measure: more data rows than header N at line " +
                    std::to_string(lineno));
    std::stringstream ss(line);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != m.d + 1)
      throw IoError("load_measure: row " + std::to_string(row + 1) + " (line " +
                    std::to_string(lineno) + ") has " +
                    std::to_string(vals.size()) + " fields, expected " +
                    std::to_string(m.d + 1));
    for (int a = 0; a < m.d; ++a) m.points(a, row) = vals[a];
    double w = vals[m.d];
    if (!(w > 0.0))
      throw IoError("load_measure: non-positive weight in row " +
                    std::to_string(row + 1));
    m.weights(row) = w;
    ++row;
  }
  if (row != N)
    throw IoError("load_measure: header says N=" + std::to_string(N) +
                  " but file has " + std::to_string(row) + " data rows");
  m.label = "file(" + path + ")";
  m.validate();
  return m;
}

RegularityReport ad_regularity_report(const DiscreteMeasure& m,
                                      const std::vector<double>& radii,
                                      int center_count, std::uint64_t seed,
                                      double tolerance) {
  if (radii.empty())
    throw ValidationError("ad_regularity_report: empty radii list");
  double diam = m.diameter();
  double lo = 4.0 * m.h;
  for (double r : radii) {
    if (m.size() >= 2 && (r < lo * (1.0 - 1e-12) || r > diam * (1.0 + 1e-12)))
      throw ValidationError(
          "ad_regularity_report: radius " + format_double(r) +
          " outside [4h, diameter] = [" + format_double(lo) + ", " +
          format_double(diam) + "]");
  }

  RegularityReport rep;
  rep.seed = seed;
  rep.probed_scales = radii;

  Rng rng(seed);
  std::vector<int> centers;
  if (center_count >= m.size()) {
    centers.resize(m.size());
    for (int i = 0; i < m.size(); ++i) centers[i] = i;
  } else {
    for (int k = 0; k < center_count; ++k)
      centers.push_back(static_cast<int>(rng.index(m.size())));
  }

  std::vector<RegularityProbe> probes;
  double log_sum = 0.0;
  for (int ci : centers) {
    for (double r : radii) {
      Ball b{m.points.col(ci), r};
      double mass = m.ball_mass(b);
      RegularityProbe p;
      p.center_index = ci;
      p.radius = r;
      p.ratio = mass / pow_int(r, m.n);
      probes.push_back(p);
      log_sum += std::log(std::max(p.ratio, 1e-300));
    }
  }
  rep.probe_count = static_cast<int>(probes.size());
  double gmean = std::exp(log_sum / probes.size());

  rep.c0_lower = probes[0].ratio;
  rep.c0_upper = probes[0].ratio;
  for (const auto& p : probes) {
    rep.c0_lower = std::min(rep.c0_lower, p.ratio);
    rep.c0_upper = std::max(rep.c0_upper, p.ratio);
    if (p.ratio > gmean * tolerance || p.ratio < gmean / tolerance)
      rep.violations.push_back(p);
  }
  return rep;
}

DiscreteMeasure restrict_indices(const DiscreteMeasure& m,
                                 const std::vector<int>& indices,
                                 const std::string& region_note) {
  if (indices.empty())
    throw EmptyRestrictionError("restrict: empty restriction (" + region_note + ")");
  DiscreteMeasure r;
  r.d = m.d;
  r.n = m.n;
  r.h = m.h;
  r.points.resize(m.d, indices.size());
  r.weights.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    r.points.col(k) = m.points.col(indices[k]);
    r.weights(k) = m.weights(indices[k]);
  }
  r.label = m.label + " | " + region_note;
  return r;
}

DiscreteMeasure restrict_ball(const DiscreteMeasure& m, const Ball& b) {
  std::vector<int> keep;
  double r2 = b.radius * b.radius;
  for (int i = 0; i < m.size(); ++i)
    if ((m.points.col(i) - b.center).squaredNorm() <= r2) keep.push_back(i);
  return restrict_indices(m, keep,
                          "ball(r=" + format_double(b.radius) + ")");
}

}  // namespace adflat
