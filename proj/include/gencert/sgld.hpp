#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "gencert/mlp.hpp"
#include "gencert/rng.hpp"

namespace gencert {

struct ParityDataset {
  std::size_t d = 0;
  std::size_t rows = 0;
  std::vector<double> x;  // rows x d, entries in {0, 1}
  std::vector<double> y;
  std::vector<std::size_t> parity_coords;

  Batch batch() const { return {x.data(), y.data(), rows}; }
};

// Train and test rows are distinct points of {0,1}^d (so n_train + n_test <=
// 2^d); the label is the XOR of k coordinates chosen once from the seed.
std::pair<ParityDataset, ParityDataset> parity_dataset(std::size_t d, std::size_t k, std::size_t n_train,
                                                       std::size_t n_test, std::uint64_t seed);

struct TrainConfig {
  double lr = 0.05;
  double beta = 1.0;    // +inf: plain SGD, no noise, no decay
  double lambda = 1.0;  // a parameter in a layer with fan-in f gets precision lambda * f
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double delta = 0.01;
  std::size_t n_init_samples = 100;
  BiasInit bias = BiasInit::Gaussian;
  std::size_t trace_every = 0;  // 0: no per-epoch trace
};

void validate(const TrainConfig& cfg, std::size_t n_train);

// lambda * fan_in for every entry of net.flat().
std::vector<double> parameter_precisions(const MlpParams& net, double lambda);

// One pass over shuffled minibatches of
//   theta <- theta - lr grad - lr (lambda_i / beta) theta + sqrt(2 lr / beta) xi.
// Returns the mean minibatch loss.
double sgld_epoch(MlpParams& net, const ParityDataset& data, const TrainConfig& cfg, Rng& rng);

struct InitLoss {
  double mean, se, max_observed;
};

// L_S averaged over n_init fresh initializations.
InitLoss estimate_init_loss(const std::vector<std::size_t>& dims, const ParityDataset& train, std::size_t n_init,
                            std::uint64_t seed, BiasInit bias = BiasInit::Gaussian);

struct EpochTrace {
  std::size_t epoch;
  double batch_loss;
  double train_loss;
  double train_error;
};

struct CertReport {
  double beta;
  double train_error;
  double test_error;
  double gap;
  double init_loss;
  double init_loss_se;
  double bound;  // +inf when beta is +inf
  bool non_vacuous;
  std::vector<EpochTrace> trace;
};

CertReport train_and_certify(const std::vector<std::size_t>& dims, const ParityDataset& train,
                             const ParityDataset& test, const TrainConfig& cfg);

}  // namespace gencert
