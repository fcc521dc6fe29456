#include <cstring>
#include <vector>

#include "doctest.h"
#include "gencert/rng.hpp"
#include "gencert/simd/kernels.hpp"

using namespace gencert;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const simd::KernelTable* vector_table() { return simd::avx2_kernels(); }

}  // namespace

TEST_CASE("scalar dot matches a plain loop up to reassociation") {
  Rng rng(1);
  const auto& s = simd::scalar_kernels();
  for (std::size_t n : {0u, 1u, 3u, 15u, 16u, 17u, 100u, 1031u}) {
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    long double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(a[i]) * b[i];
    CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  }
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  const auto* v = vector_table();
  if (v == nullptr) {
    MESSAGE("host has no AVX2; nothing to compare");
    return;
  }
  const auto& s = simd::scalar_kernels();
  Rng rng(2);
  for (std::size_t n : {1u, 2u, 4u, 5u, 15u, 16u, 17u, 33u, 64u, 257u, 1000u}) {
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    const double ds = s.dot(a.data(), b.data(), n), dv = v->dot(a.data(), b.data(), n);
    CHECK(std::memcmp(&ds, &dv, sizeof ds) == 0);

    auto y1 = random_vec(rng, n), y2 = y1;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    CHECK(same_bits(y1, y2));

    const std::size_t rows = 1 + n % 7;
    auto w = random_vec(rng, rows * n);
    std::vector<double> o1(rows), o2(rows);
    s.matvec(w.data(), rows, n, a.data(), o1.data());
    v->matvec(w.data(), rows, n, a.data(), o2.data());
    CHECK(same_bits(o1, o2));

    auto u = random_vec(rng, rows);
    auto t1 = random_vec(rng, n), t2 = t1;
    s.matvec_t_acc(w.data(), rows, n, u.data(), t1.data());
    v->matvec_t_acc(w.data(), rows, n, u.data(), t2.data());
    CHECK(same_bits(t1, t2));

    auto th1 = random_vec(rng, n), th2 = th1;
    auto drift = random_vec(rng, n), scale = random_vec(rng, n), xi = random_vec(rng, n);
    s.em_update(th1.data(), drift.data(), scale.data(), xi.data(), 1e-3, n);
    v->em_update(th2.data(), drift.data(), scale.data(), xi.data(), 1e-3, n);
    CHECK(same_bits(th1, th2));

    auto f1 = random_vec(rng, n, 3.0), f2 = f1;
    s.fold_interval(f1.data(), -1.0, 0.5, n);
    v->fold_interval(f2.data(), -1.0, 0.5, n);
    CHECK(same_bits(f1, f2));

    auto g = random_vec(rng, n), decay = random_vec(rng, n, 1e-3);
    auto p1 = random_vec(rng, n), p2 = p1;
    s.sgld_update(p1.data(), g.data(), decay.data(), xi.data(), 0.05, 0.01, n);
    v->sgld_update(p2.data(), g.data(), decay.data(), xi.data(), 0.05, 0.01, n);
    CHECK(same_bits(p1, p2));
  }
}

TEST_CASE("fold_interval reflects at the faces and keeps interior points") {
  for (const auto* t : {&simd::scalar_kernels(), vector_table()}) {
    if (t == nullptr) continue;
    std::vector<double> x{1.2, -0.3, 2.5, 0.25, 0.0, 1.0, -1.7, 7.75, 0.1, 0.9, 3.0, -2.0, 0.3333, 1.5, -0.5, 4.4, 0.6};
    const std::vector<double> want{0.8, 0.3, 0.5, 0.25, 0.0, 1.0, 0.3, 0.25, 0.1, 0.9, 1.0, 0.0, 0.3333, 0.5, 0.5, 0.4, 0.6};
    t->fold_interval(x.data(), 0.0, 1.0, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(x[3] == 0.25);
    CHECK(x[12] == 0.3333);
  }
}

TEST_CASE("active kernels pick a known table") {
  const auto name = simd::active_kernels().name;
  CHECK((name == simd::scalar_kernels().name || (vector_table() && name == vector_table()->name)));
}
