#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gencert {

// Fully connected net, ReLU on hidden layers, scalar linear output. All
// parameters live in one flat vector so optimizers can run a single kernel
// over them; layer l has a (dims[l+1] x dims[l]) row-major weight block
// followed by its bias block.
class MlpParams {
 public:
  MlpParams() = default;
  explicit MlpParams(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t layers() const { return dims_.size() - 1; }
  std::size_t fan_in(std::size_t l) const { return dims_[l]; }
  std::size_t fan_out(std::size_t l) const { return dims_[l + 1]; }
  std::size_t num_params() const { return theta_.size(); }

  double* weights(std::size_t l) { return theta_.data() + w_off_[l]; }
  const double* weights(std::size_t l) const { return theta_.data() + w_off_[l]; }
  double* biases(std::size_t l) { return theta_.data() + b_off_[l]; }
  const double* biases(std::size_t l) const { return theta_.data() + b_off_[l]; }
  double& w(std::size_t l, std::size_t out, std::size_t in) { return weights(l)[out * dims_[l] + in]; }
  double& b(std::size_t l, std::size_t out) { return biases(l)[out]; }

  std::vector<double>& flat() { return theta_; }
  const std::vector<double>& flat() const { return theta_; }
  // Index range [begin, end) of layer l's parameters in flat().
  std::size_t layer_begin(std::size_t l) const { return w_off_[l]; }
  std::size_t layer_end(std::size_t l) const { return b_off_[l] + dims_[l + 1]; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> w_off_, b_off_;
  std::vector<double> theta_;
};

void validate_dims(const std::vector<std::size_t>& dims);

enum class BiasInit { Zero, Gaussian };

// Weights i.i.d. N(0, 1/fan_in); biases zero or N(0, 1/fan_in).
MlpParams init_mlp(const std::vector<std::size_t>& dims, std::uint64_t seed, BiasInit bias = BiasInit::Zero);

// Row-major inputs (rows x dims[0]) with labels in {0, 1}.
struct Batch {
  const double* x = nullptr;
  const double* y = nullptr;
  std::size_t rows = 0;
};

struct ForwardResult {
  std::vector<double> logits;
  double logistic_loss = 0.0;   // mean ln(1 + exp(-(2y-1) z))
  double zero_one_error = 0.0;  // a zero logit counts as an error
};

ForwardResult mlp_forward(const MlpParams& net, const Batch& batch);

double mlp_output(const MlpParams& net, const double* x);

// Mean logistic loss over the listed rows (all rows when idx is empty) and
// its gradient, written into grad (resized to num_params()).
double mlp_loss_grad(const MlpParams& net, const Batch& batch, const std::vector<std::size_t>& idx,
                     std::vector<double>& grad);

double logistic_loss(double logit, double label);

}  // namespace gencert
