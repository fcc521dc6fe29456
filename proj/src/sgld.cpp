#include "gencert/sgld.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "gencert/bounds.hpp"
#include "gencert/error.hpp"
#include "gencert/simd/kernels.hpp"

namespace gencert {

std::pair<ParityDataset, ParityDataset> parity_dataset(std::size_t d, std::size_t k, std::size_t n_train,
                                                       std::size_t n_test, std::uint64_t seed) {
  require(d >= 1 && d <= 62, "d must lie in [1, 62]");
  require(k >= 1 && k <= d, "need 1 <= k <= d");
  require(n_train > 0, "need a nonempty training set");
  const std::uint64_t space = 1ULL << d;
  require(n_train + n_test <= space, "train + test size exceeds 2^d distinct points");
  Rng rng(seed);

  std::vector<std::size_t> coords(d);
  std::iota(coords.begin(), coords.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(coords[i], coords[i + rng.below(d - i)]);
  coords.resize(k);
  std::sort(coords.begin(), coords.end());

  std::unordered_set<std::uint64_t> seen;
  auto fill = [&](std::size_t rows) {
    ParityDataset ds;
    ds.d = d;
    ds.rows = rows;
    ds.parity_coords = coords;
    ds.x.resize(rows * d);
    ds.y.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t v;
      do {
        v = rng.next_u64() & (space - 1);
      } while (!seen.insert(v).second);
      int parity = 0;
      for (std::size_t j = 0; j < d; ++j) ds.x[r * d + j] = static_cast<double>((v >> j) & 1u);
      for (auto c : coords) parity ^= static_cast<int>((v >> c) & 1u);
      ds.y[r] = parity;
    }
    return ds;
  };
  ParityDataset train = fill(n_train);
  ParityDataset test = fill(n_test);
  return {std::move(train), std::move(test)};
}

void validate(const TrainConfig& cfg, std::size_t n_train) {
  require(std::isfinite(cfg.lr) && cfg.lr >= 0.0, "lr must be >= 0");
  require(cfg.beta > 0.0 && !std::isnan(cfg.beta), "beta must be positive (or +inf)");
  require(std::isfinite(cfg.lambda) && cfg.lambda >= 0.0, "lambda must be >= 0");
  require(cfg.batch_size >= 1 && cfg.batch_size <= n_train, "batch size must lie in [1, N]");
  require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta must lie in (0, 1)");
  require(cfg.n_init_samples >= 10, "need at least 10 initialization samples");
}

std::vector<double> parameter_precisions(const MlpParams& net, double lambda) {
  std::vector<double> prec(net.num_params());
  for (std::size_t l = 0; l < net.layers(); ++l)
    std::fill(prec.begin() + static_cast<std::ptrdiff_t>(net.layer_begin(l)),
              prec.begin() + static_cast<std::ptrdiff_t>(net.layer_end(l)),
              lambda * static_cast<double>(net.fan_in(l)));
  return prec;
}

double sgld_epoch(MlpParams& net, const ParityDataset& data, const TrainConfig& cfg, Rng& rng) {
  validate(cfg, data.rows);
  const auto& k = simd::active_kernels();
  const bool noisy = std::isfinite(cfg.beta);
  std::vector<double> decay = parameter_precisions(net, cfg.lambda);
  for (auto& v : decay) v = noisy ? cfg.lr * v / cfg.beta : 0.0;
  const double noise = noisy ? std::sqrt(2.0 * cfg.lr / cfg.beta) : 0.0;

  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = data.rows; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<double> grad, xi(net.num_params(), 0.0);
  std::vector<std::size_t> idx;
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < data.rows; start += cfg.batch_size) {
    const std::size_t end = std::min(data.rows, start + cfg.batch_size);
    idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
    const double loss = mlp_loss_grad(net, data.batch(), idx, grad);
    if (!std::isfinite(loss))
      throw NumericalError("SGLD diverged (loss " + std::to_string(loss) + ") at batch " + std::to_string(batches));
    if (noisy)
      for (auto& v : xi) v = rng.normal();
    k.sgld_update(net.flat().data(), grad.data(), decay.data(), xi.data(), cfg.lr, noise, net.num_params());
    total += loss;
    ++batches;
  }
  return total / static_cast<double>(batches);
}

InitLoss estimate_init_loss(const std::vector<std::size_t>& dims, const ParityDataset& train, std::size_t n_init,
                            std::uint64_t seed, BiasInit bias) {
  require(n_init >= 10, "need at least 10 initialization samples");
  double sum = 0.0, sum2 = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < n_init; ++i) {
    const MlpParams net = init_mlp(dims, derive_seed(seed, i), bias);
    const double l = mlp_forward(net, train.batch()).logistic_loss;
    sum += l;
    sum2 += l * l;
    mx = std::max(mx, l);
  }
  const double n = static_cast<double>(n_init);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), mx};
}

CertReport train_and_certify(const std::vector<std::size_t>& dims, const ParityDataset& train,
                             const ParityDataset& test, const TrainConfig& cfg) {
  validate(cfg, train.rows);
  require(dims.front() == train.d, "input width must equal the data dimension");
  require(test.rows > 0, "need a nonempty test set");

  const InitLoss e0 = estimate_init_loss(dims, train, cfg.n_init_samples, derive_seed(cfg.seed, 1), cfg.bias);
  MlpParams net = init_mlp(dims, derive_seed(cfg.seed, 2), cfg.bias);
  Rng rng(derive_seed(cfg.seed, 3));

  CertReport rep{};
  rep.beta = cfg.beta;
  for (std::size_t ep = 1; ep <= cfg.epochs; ++ep) {
    const double bl = sgld_epoch(net, train, cfg, rng);
    if (cfg.trace_every > 0 && (ep % cfg.trace_every == 0 || ep == cfg.epochs)) {
      const auto f = mlp_forward(net, train.batch());
      rep.trace.push_back({ep, bl, f.logistic_loss, f.zero_one_error});
    }
  }
  rep.train_error = mlp_forward(net, train.batch()).zero_one_error;
  rep.test_error = mlp_forward(net, test.batch()).zero_one_error;
  rep.gap = rep.test_error - rep.train_error;
  rep.init_loss = e0.mean;
  rep.init_loss_se = e0.se;
  rep.bound = cld_bound(BoundMode::Mean, cfg.beta, e0.mean, static_cast<double>(train.rows), cfg.delta);
  rep.non_vacuous = rep.train_error + rep.bound < 0.5;
  return rep;
}

}  // namespace gencert
