#include "gencert/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "gencert/error.hpp"
#include "gencert/rng.hpp"
#include "gencert/simd/kernels.hpp"

namespace gencert {

void validate_dims(const std::vector<std::size_t>& dims) {
  require(dims.size() >= 2, "an MLP needs at least an input and an output layer");
  for (auto v : dims) require(v > 0, "layer widths must be positive");
  require(dims.back() == 1, "the output layer must have width 1");
}

MlpParams::MlpParams(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  validate_dims(dims_);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    w_off_.push_back(off);
    off += dims_[l] * dims_[l + 1];
    b_off_.push_back(off);
    off += dims_[l + 1];
  }
  theta_.assign(off, 0.0);
}

MlpParams init_mlp(const std::vector<std::size_t>& dims, std::uint64_t seed, BiasInit bias) {
  MlpParams net(dims);
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const double sd = 1.0 / std::sqrt(static_cast<double>(net.fan_in(l)));
    double* w = net.weights(l);
    for (std::size_t i = 0; i < net.fan_in(l) * net.fan_out(l); ++i) w[i] = sd * rng.normal();
    double* b = net.biases(l);
    for (std::size_t i = 0; i < net.fan_out(l); ++i) b[i] = bias == BiasInit::Gaussian ? sd * rng.normal() : 0.0;
  }
  return net;
}

double logistic_loss(double logit, double label) {
  const double u = (2.0 * label - 1.0) * logit;
  return std::max(-u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

namespace {

// Activations per layer: acts[0] is the input, acts[l+1] the post-ReLU output
// of layer l (the last one is the raw logit).
struct Workspace {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> deltas;
  explicit Workspace(const MlpParams& net) {
    for (auto d : net.dims()) {
      acts.emplace_back(d, 0.0);
      deltas.emplace_back(d, 0.0);
    }
  }
};

double forward_one(const MlpParams& net, const double* x, Workspace& ws) {
  const auto& k = simd::active_kernels();
  std::copy(x, x + net.dims()[0], ws.acts[0].begin());
  for (std::size_t l = 0; l < net.layers(); ++l) {
    auto& out = ws.acts[l + 1];
    k.matvec(net.weights(l), net.fan_out(l), net.fan_in(l), ws.acts[l].data(), out.data());
    const double* b = net.biases(l);
    const bool hidden = l + 1 < net.layers();
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += b[i];
      if (hidden && out[i] < 0.0) out[i] = 0.0;
    }
  }
  return ws.acts.back()[0];
}

}  // namespace

double mlp_output(const MlpParams& net, const double* x) {
  Workspace ws(net);
  return forward_one(net, x, ws);
}

ForwardResult mlp_forward(const MlpParams& net, const Batch& batch) {
  require(batch.rows > 0, "empty batch");
  Workspace ws(net);
  ForwardResult r;
  r.logits.resize(batch.rows);
  double loss = 0.0, err = 0.0;
  const std::size_t din = net.dims()[0];
  for (std::size_t i = 0; i < batch.rows; ++i) {
    const double z = forward_one(net, batch.x + i * din, ws);
    if (std::isnan(z)) throw NumericalError("network output is NaN at row " + std::to_string(i));
    r.logits[i] = z;
    loss += logistic_loss(z, batch.y[i]);
    if ((2.0 * batch.y[i] - 1.0) * z <= 0.0) err += 1.0;
  }
  r.logistic_loss = loss / static_cast<double>(batch.rows);
  r.zero_one_error = err / static_cast<double>(batch.rows);
  return r;
}

double mlp_loss_grad(const MlpParams& net, const Batch& batch, const std::vector<std::size_t>& idx,
                     std::vector<double>& grad) {
  const auto& k = simd::active_kernels();
  grad.assign(net.num_params(), 0.0);
  const std::size_t count = idx.empty() ? batch.rows : idx.size();
  require(count > 0, "empty batch");
  Workspace ws(net);
  const std::size_t din = net.dims()[0];
  double loss = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t row = idx.empty() ? s : idx[s];
    const double z = forward_one(net, batch.x + row * din, ws);
    const double sy = 2.0 * batch.y[row] - 1.0;
    loss += logistic_loss(z, batch.y[row]);
    // d/dz ln(1 + exp(-sy z)) = -sy / (1 + exp(sy z))
    const double u = sy * z;
    const double sig = u >= 0.0 ? std::exp(-u) / (1.0 + std::exp(-u)) : 1.0 / (1.0 + std::exp(u));
    ws.deltas.back()[0] = -sy * sig;
    for (std::size_t l = net.layers(); l-- > 0;) {
      const auto& delta = ws.deltas[l + 1];
      const auto& a_prev = ws.acts[l];
      const std::size_t fi = net.fan_in(l), fo = net.fan_out(l);
      double* gw = grad.data() + net.layer_begin(l);
      double* gb = gw + fi * fo;
      for (std::size_t r = 0; r < fo; ++r) {
        if (delta[r] == 0.0) continue;
        k.axpy(delta[r], a_prev.data(), gw + r * fi, fi);
        gb[r] += delta[r];
      }
      if (l == 0) break;
      auto& dprev = ws.deltas[l];
      std::fill(dprev.begin(), dprev.end(), 0.0);
      k.matvec_t_acc(net.weights(l), fo, fi, delta.data(), dprev.data());
      for (std::size_t i = 0; i < fi; ++i)
        if (a_prev[i] <= 0.0) dprev[i] = 0.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (auto& g : grad) g *= inv;
  if (std::isnan(loss)) throw NumericalError("loss is NaN");
  return loss * inv;
}

}  // namespace gencert
