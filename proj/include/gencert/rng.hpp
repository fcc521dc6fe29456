#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace gencert {

// splitmix64 finalizer; used to derive independent per-instance seeds from a
// master seed so sweeps do not depend on scheduling.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Sequential generator. Uniforms and normals are produced from raw 64-bit
// words by our own transforms, never by <random> distributions, whose output
// is implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  double uniform();           // [0, 1)
  double uniform_open();      // (0, 1]
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double exponential() { return -std::log(uniform_open()); }
  std::uint64_t below(std::uint64_t n);  // uniform integer in [0, n)
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Counter-based Philox4x32-10. Output depends only on (key, counter), which
// is what lets Langevin ensembles reproduce bit-for-bit for any work split.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t seed);
  static Philox from_key(std::uint32_t k0, std::uint32_t k1);

  Block operator()(Block ctr) const;

  // Two independent standard normals for the counter (index, stream).
  std::pair<double, double> normals(std::uint64_t stream, std::uint64_t index) const;
  // Two independent uniforms in [0, 1).
  std::pair<double, double> uniforms(std::uint64_t stream, std::uint64_t index) const;

 private:
  std::uint32_t k0_, k1_;
};

// Box-Muller pair from u1 in (0,1] and u2 in [0,1).
std::pair<double, double> box_muller(double u1, double u2);

inline double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace gencert
