#include "gencert/rng.hpp"

#include <cmath>
#include <numbers>

namespace gencert {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::pair<double, double> box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double Rng::uniform() { return u64_to_unit(eng_()); }

double Rng::uniform_open() { return 1.0 - uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  auto [z0, z1] = box_muller(u1, u2);
  spare_ = z1;
  has_spare_ = true;
  return z0;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % n;
}

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
}  // namespace

Philox::Philox(std::uint64_t seed) {
  const std::uint64_t k = mix64(seed);
  k0_ = static_cast<std::uint32_t>(k);
  k1_ = static_cast<std::uint32_t>(k >> 32);
}

Philox Philox::from_key(std::uint32_t k0, std::uint32_t k1) {
  Philox p(0);
  p.k0_ = k0;
  p.k1_ = k1;
  return p;
}

Philox::Block Philox::operator()(Block c) const {
  std::uint32_t k0 = k0_, k1 = k1_;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::pair<double, double> Philox::uniforms(std::uint64_t stream, std::uint64_t index) const {
  const Block out = (*this)({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                             static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  return {u64_to_unit(a), u64_to_unit(b)};
}

std::pair<double, double> Philox::normals(std::uint64_t stream, std::uint64_t index) const {
  auto [u1, u2] = uniforms(stream, index);
  return box_muller(1.0 - u1, u2);
}

}  // namespace gencert
