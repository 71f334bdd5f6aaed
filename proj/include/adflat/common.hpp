#ifndef ADFLAT_COMMON_HPP
#define ADFLAT_COMMON_HPP

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace adflat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Restricting a measure to a region that contains no support point.
// Callers decide whether this is fatal.
class EmptyRestrictionError : public Error {
 public:
  explicit EmptyRestrictionError(const std::string& msg) : Error(msg) {}
};

struct Ball {
  Vec center;
  double radius = 0.0;

  bool contains(const Eigen::Ref<const Vec>& p) const {
    return (p - center).norm() <= radius;
  }
};

// Counter-based RNG (splitmix64). Used instead of <random> engines so that
// sampled probe sets are reproducible across standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // uniform index in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  }

 private:
  std::uint64_t state_;
};

// Static-free parallel map. Each index writes only its own slot, so results
// are identical for any thread count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  int nt = std::min<int>(threads, static_cast<int>(n));
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= n) break;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// FNV-1a, used for content-hash cache keys.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

// Round-trip-exact decimal formatting (>= 15 significant digits).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline double pow_int(double base, int e) {
  double r = 1.0;
  bool inv = e < 0;
  for (int k = 0; k < (inv ? -e : e); ++k) r *= base;
  return inv ? 1.0 / r : r;
}

// 2^{-j} for signed j
inline double dyadic(int j) { return std::ldexp(1.0, -j); }

}  // namespace adflat

#endif  // ADFLAT_COMMON_HPP
