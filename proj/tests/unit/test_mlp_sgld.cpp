#include <cmath>
#include <set>

#include "doctest.h"
#include "gencert/bounds.hpp"
#include "gencert/error.hpp"
#include "gencert/extended_real.hpp"
#include "gencert/mlp.hpp"
#include "gencert/rng.hpp"
#include "gencert/sgld.hpp"

using namespace gencert;
using doctest::Approx;

namespace {

ParityDataset tiny_data(std::vector<double> x, std::vector<double> y, std::size_t d) {
  ParityDataset ds;
  ds.d = d;
  ds.rows = y.size();
  ds.x = std::move(x);
  ds.y = std::move(y);
  return ds;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("mlp layout") {
  MlpParams net({3, 4, 1});
  CHECK(net.num_params() == 3 * 4 + 4 + 4 + 1);
  CHECK(net.layer_begin(1) == 16);
  CHECK(net.layer_end(1) == 21);
  net.w(1, 0, 2) = 5.0;
  CHECK(net.flat()[16 + 2] == 5.0);
  CHECK_THROWS_AS(validate_dims({3, 4, 2}), ValidationError);
  CHECK_THROWS_AS(validate_dims({3}), ValidationError);
}

TEST_CASE("init moments and output scale") {
  const auto net = init_mlp({128, 128, 64, 1}, 7);
  for (std::size_t l = 0; l + 1 < net.layers(); ++l) {
    const std::size_t cnt = net.fan_in(l) * net.fan_out(l);
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < cnt; ++i) {
      s += net.weights(l)[i];
      s2 += net.weights(l)[i] * net.weights(l)[i];
    }
    const double var = s2 / cnt - (s / cnt) * (s / cnt);
    CHECK(var == Approx(1.0 / net.fan_in(l)).epsilon(0.1));
    for (std::size_t o = 0; o < net.fan_out(l); ++o) CHECK(net.biases(l)[o] == 0.0);
  }
  Rng rng(1);
  std::vector<double> x(128);
  double s = 0, s2 = 0;
  for (int i = 0; i < 1000; ++i) {
    for (auto& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double z = mlp_output(net, x.data());
    s += z;
    s2 += z * z;
  }
  const double sd = std::sqrt(s2 / 1000 - (s / 1000) * (s / 1000));
  CHECK(sd >= 0.1);
  CHECK(sd <= 10);
  CHECK(init_mlp({4, 3, 1}, 3).flat() == init_mlp({4, 3, 1}, 3).flat());
  const auto g = init_mlp({4, 3, 1}, 3, BiasInit::Gaussian);
  CHECK(g.biases(0)[0] != 0.0);
}

TEST_CASE("forward conventions") {
  MlpParams zero({2, 3, 1});
  const auto ds = tiny_data({0, 1, 1, 0, 1, 1}, {1, 0, 1}, 2);
  const auto f = mlp_forward(zero, ds.batch());
  CHECK(f.logistic_loss == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(f.zero_one_error == 1.0);

  MlpParams lin({1, 1});
  lin.w(0, 0, 0) = 20.0;
  lin.b(0, 0) = -10.0;
  const auto sep = tiny_data({0, 1}, {0, 1}, 1);
  const auto g = mlp_forward(lin, sep.batch());
  CHECK(g.logistic_loss <= 5e-5);
  CHECK(g.zero_one_error == 0.0);
  CHECK(logistic_loss(1000.0, 1.0) == Approx(0.0).scale(1));
  CHECK(logistic_loss(-1000.0, 1.0) == Approx(1000.0));
}

TEST_CASE("gradients against central differences") {
  const auto ds = parity_dataset(6, 2, 40, 0, 3).first;
  auto net = init_mlp({6, 8, 5, 1}, 4, BiasInit::Gaussian);
  std::vector<double> grad;
  mlp_loss_grad(net, ds.batch(), {}, grad);
  Rng rng(5);
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t i = rng.below(net.num_params());
    const double keep = net.flat()[i], h = 1e-5;
    net.flat()[i] = keep + h;
    const double up = mlp_forward(net, ds.batch()).logistic_loss;
    net.flat()[i] = keep - h;
    const double dn = mlp_forward(net, ds.batch()).logistic_loss;
    net.flat()[i] = keep;
    const double fd = (up - dn) / (2 * h);
    CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1e-3, std::abs(fd)));
  }
}

TEST_CASE("sgld epoch special cases") {
  const auto ds = parity_dataset(5, 2, 20, 0, 2).first;
  auto net = init_mlp({5, 4, 1}, 1, BiasInit::Gaussian);
  const auto before = net.flat();
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.beta = 10.0;
  cfg.batch_size = 4;
  Rng rng(1);
  sgld_epoch(net, ds, cfg, rng);
  CHECK(net.flat() == before);

  // beta = inf, lambda = 0, one row, w = 0.5, b = 0.25, x = 2, y = 1:
  // grad_w = (s(z) - 1) x, grad_b = s(z) - 1 with z = 1.25
  MlpParams one({1, 1});
  one.w(0, 0, 0) = 0.5;
  one.b(0, 0) = 0.25;
  const auto row = tiny_data({2.0}, {1.0}, 1);
  TrainConfig sgd;
  sgd.lr = 0.1;
  sgd.beta = kInf;
  sgd.lambda = 0.0;
  sgd.batch_size = 1;
  Rng r2(2);
  sgld_epoch(one, row, sgd, r2);
  const double gz = sigmoid(1.25) - 1.0;
  CHECK(one.w(0, 0, 0) == Approx(0.5 - 0.1 * gz * 2.0).epsilon(1e-15));
  CHECK(one.b(0, 0) == Approx(0.25 - 0.1 * gz).epsilon(1e-15));
}

TEST_CASE("sgld noise calibration under zero gradient") {
  // x = 0 zeroes the weight gradient; lambda = 0 removes decay.
  MlpParams one({1, 1});
  const auto row = tiny_data({0.0}, {1.0}, 1);
  TrainConfig cfg;
  cfg.lr = 0.02;
  cfg.beta = 5.0;
  cfg.lambda = 0.0;
  cfg.batch_size = 1;
  Rng rng(9);
  double s2 = 0;
  const int steps = 100000;
  for (int i = 0; i < steps; ++i) {
    const double w0 = one.w(0, 0, 0);
    sgld_epoch(one, row, cfg, rng);
    const double inc = one.w(0, 0, 0) - w0;
    s2 += inc * inc;
  }
  CHECK(s2 / steps == Approx(2 * cfg.lr / cfg.beta).epsilon(0.05));
}

TEST_CASE("parity dataset") {
  const auto [tr, te] = parity_dataset(10, 1, 300, 200, 4);
  REQUIRE(tr.parity_coords.size() == 1);
  for (std::size_t r = 0; r < tr.rows; ++r) CHECK(tr.y[r] == tr.x[r * 10 + tr.parity_coords[0]]);
  const auto [a, b] = parity_dataset(16, 3, 4000, 2000, 11);
  double ones = 0;
  for (double v : a.y) ones += v;
  CHECK(std::abs(ones / 4000 - 0.5) <= 3 / std::sqrt(4000.0));
  for (std::size_t r = 0; r < a.rows; ++r) {
    int parity = 0;
    for (auto c : a.parity_coords) parity ^= static_cast<int>(a.x[r * 16 + c]);
    CHECK(a.y[r] == parity);
  }
  std::set<std::vector<double>> seen;
  for (const auto* ds : {&a, &b})
    for (std::size_t r = 0; r < ds->rows; ++r)
      seen.insert(std::vector<double>(ds->x.begin() + r * 16, ds->x.begin() + (r + 1) * 16));
  CHECK(seen.size() == 6000);
  const auto again = parity_dataset(16, 3, 4000, 2000, 11);
  CHECK(again.first.x == a.x);
  CHECK(again.first.parity_coords == a.parity_coords);
  CHECK_THROWS_AS(parity_dataset(4, 2, 10, 10, 1), ValidationError);
}

TEST_CASE("init loss estimate") {
  const auto ds = parity_dataset(8, 3, 200, 0, 1).first;
  const auto e1 = estimate_init_loss({8, 16, 1}, ds, 100, 5);
  const auto e4 = estimate_init_loss({8, 16, 1}, ds, 400, 6);
  CHECK(e1.mean >= 0.5);
  CHECK(e1.mean <= 1.0);
  CHECK(e1.max_observed >= e1.mean);
  CHECK(e4.se == Approx(e1.se / 2).epsilon(0.3));
  CHECK(estimate_init_loss({8, 16, 1}, ds, 100, 5).mean == e1.mean);
  CHECK_THROWS_AS(estimate_init_loss({8, 16, 1}, ds, 5, 5), ValidationError);
}

TEST_CASE("certificate uses the shared bound formula") {
  const auto [tr, te] = parity_dataset(8, 2, 200, 50, 3);
  TrainConfig cfg;
  cfg.beta = 80.0;
  cfg.epochs = 3;
  cfg.batch_size = 20;
  cfg.seed = 4;
  const auto r = train_and_certify({8, 16, 1}, tr, te, cfg);
  CHECK(r.bound == cld_bound(BoundMode::Mean, 80.0, r.init_loss, 200.0, cfg.delta));
  CHECK(r.bound == Approx(std::sqrt((0.4 * r.init_loss + std::log(100.0) / 200) / 2)).epsilon(1e-14));
  CHECK(r.gap == Approx(r.test_error - r.train_error));
  CHECK(r.non_vacuous == (r.train_error + r.bound < 0.5));
  cfg.beta = kInf;
  const auto inf = train_and_certify({8, 16, 1}, tr, te, cfg);
  CHECK(std::isinf(inf.bound));
  CHECK_FALSE(inf.non_vacuous);
  const auto again = train_and_certify({8, 16, 1}, tr, te, cfg);
  CHECK(again.train_error == inf.train_error);
}
