#include "gencert/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "gencert/extended_real.hpp"
#include "gencert/simd/kernels.hpp"

namespace gencert {

BoxDomain BoxDomain::cube(std::size_t dim, double lo, double hi) {
  return BoxDomain{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

double BoxDomain::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= highs[i] - lows[i];
  return v;
}

bool BoxDomain::contains(const double* theta) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(theta[i] >= lows[i] && theta[i] <= highs[i])) return false;
  return true;
}

void validate(const BoxDomain& box) {
  require(!box.lows.empty() && box.lows.size() == box.highs.size(), "box needs matching nonempty bounds");
  for (std::size_t i = 0; i < box.dim(); ++i)
    require(std::isfinite(box.lows[i]) && std::isfinite(box.highs[i]) && box.lows[i] < box.highs[i],
            "box needs finite bounds with m_i < M_i");
}

double Diffusion::sigma2(double loss, const double* theta) const {
  switch (kind) {
    case DiffusionKind::Unit: return 1.0;
    case DiffusionKind::Linear: return loss + alpha;
    case DiffusionKind::Poly: return std::pow(loss + alpha, k);
    case DiffusionKind::Exp: return std::exp(alpha * loss);
    case DiffusionKind::Custom: return custom(theta);
  }
  return 1.0;
}

void validate(const LangevinSystem& sys) {
  require(sys.dim > 0, "system dimension must be positive");
  require(static_cast<bool>(sys.grad), "system needs a gradient");
  require(!sys.diffusion.needs_loss() || static_cast<bool>(sys.loss), "loss-dependent diffusion needs the loss");
  require(sys.beta > 0.0 && !std::isnan(sys.beta), "beta must be positive (or +inf)");
  require(sys.lambda.empty() || sys.lambda.size() == sys.dim, "lambda must be empty or have one entry per coordinate");
  for (double l : sys.lambda) require(l >= 0.0 && std::isfinite(l), "lambda entries must be finite and >= 0");
  if (sys.box) {
    validate(*sys.box);
    require(sys.box->dim() == sys.dim, "box dimension differs from the system dimension");
  }
  if (sys.diffusion.kind == DiffusionKind::Custom) require(static_cast<bool>(sys.diffusion.custom), "custom diffusion needs sigma^2");
  if (sys.diffusion.needs_loss()) require(sys.diffusion.alpha > 0.0, "diffusion alpha must be positive");
  if (sys.diffusion.kind == DiffusionKind::Poly) require(sys.diffusion.k >= 2, "polynomial diffusion needs k >= 2");
}

namespace {

void probe_point(const LangevinSystem& sys, Rng& rng, double* x) {
  for (std::size_t i = 0; i < sys.dim; ++i) {
    if (sys.box) {
      const double lo = sys.box->lows[i], hi = sys.box->highs[i], w = hi - lo;
      x[i] = rng.uniform(lo + 0.05 * w, hi - 0.05 * w);
    } else {
      x[i] = rng.normal();
    }
  }
}

// drift(theta) = -grad L - (lambda / beta) theta, lambda only when unbounded.
void drift(const LangevinSystem& sys, const double* theta, double* out) {
  sys.grad(theta, out);
  const bool decay = !sys.box && !sys.lambda.empty() && std::isfinite(sys.beta);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    out[i] = -out[i];
    if (decay) out[i] -= (sys.lambda[i] / sys.beta) * theta[i];
  }
}

double noise_scale(const LangevinSystem& sys, const double* theta, double dt) {
  if (!std::isfinite(sys.beta)) return 0.0;
  const double loss = sys.diffusion.needs_loss() ? sys.loss(theta) : 0.0;
  const double s2 = sys.diffusion.sigma2(loss, theta);
  if (!(s2 > 0.0) || !std::isfinite(s2)) return std::nan("");
  return std::sqrt(2.0 * s2 * dt / sys.beta);
}

}  // namespace

double gradient_consistency(const LangevinSystem& sys, std::size_t probes, std::uint64_t seed) {
  validate(sys);
  require(static_cast<bool>(sys.loss), "gradient check needs the loss");
  Rng rng(seed);
  std::vector<double> x(sys.dim), g(sys.dim), xp(sys.dim);
  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    probe_point(sys, rng, x.data());
    sys.grad(x.data(), g.data());
    for (std::size_t i = 0; i < sys.dim; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      xp = x;
      xp[i] = x[i] + h;
      const double up = sys.loss(xp.data());
      xp[i] = x[i] - h;
      const double dn = sys.loss(xp.data());
      const double fd = (up - dn) / (2.0 * h);
      worst = std::max(worst, std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  return worst;
}

double drift_lipschitz_estimate(const LangevinSystem& sys, std::size_t probes, std::uint64_t seed) {
  validate(sys);
  Rng rng(seed);
  std::vector<double> x(sys.dim), xp(sys.dim), d0(sys.dim), d1(sys.dim);
  double best = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    probe_point(sys, rng, x.data());
    drift(sys, x.data(), d0.data());
    for (std::size_t i = 0; i < sys.dim; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      xp = x;
      xp[i] += h;
      drift(sys, xp.data(), d1.data());
      double col = 0.0;
      for (std::size_t j = 0; j < sys.dim; ++j) col += std::abs(d1[j] - d0[j]);
      best = std::max(best, col / h);
    }
  }
  return best;
}

void validate(const IntegratorConfig& cfg) {
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, "dt must be positive");
  require(cfg.n_traj > 0, "n_traj must be positive");
  require(cfg.thin > 0, "thin must be positive");
  require(cfg.burn_in <= cfg.steps, "burn_in must not exceed steps");
  require(cfg.workers > 0 && cfg.chunk > 0, "workers and chunk must be positive");
}

std::size_t kept_per_trajectory(const IntegratorConfig& cfg) { return (cfg.steps - cfg.burn_in) / cfg.thin; }

namespace {
std::string divergence_message(std::size_t traj, std::size_t step, const std::vector<double>& theta) {
  std::ostringstream os;
  os << "trajectory " << traj << " diverged at step " << step << " (theta =";
  for (std::size_t i = 0; i < std::min<std::size_t>(theta.size(), 8); ++i) os << ' ' << theta[i];
  if (theta.size() > 8) os << " ...";
  os << ')';
  return os.str();
}
}  // namespace

TrajectoryDivergence::TrajectoryDivergence(std::size_t traj, std::size_t step, std::vector<double> theta)
    : NumericalError(divergence_message(traj, step, theta)), traj_(traj), step_(step), theta_(std::move(theta)) {}

std::vector<double> reflect_into_box(const std::vector<double>& theta, const BoxDomain& box) {
  validate(box);
  require(theta.size() == box.dim(), "theta and box dimensions differ");
  std::vector<double> out = theta;
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    require(std::isfinite(out[i]), "cannot reflect a non-finite coordinate");
    k.fold_interval(&out[i], box.lows[i], box.highs[i], 1);
  }
  return out;
}

std::vector<double> step(const LangevinSystem& sys, const std::vector<double>& theta, double dt, Rng& rng) {
  validate(sys);
  require(theta.size() == sys.dim, "theta has the wrong dimension");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  std::vector<double> d(sys.dim), scale(sys.dim), xi(sys.dim, 0.0), out = theta;
  drift(sys, theta.data(), d.data());
  const double s = noise_scale(sys, theta.data(), dt);
  std::fill(scale.begin(), scale.end(), s);
  if (s != 0.0)
    for (auto& v : xi) v = rng.normal();
  simd::active_kernels().em_update(out.data(), d.data(), scale.data(), xi.data(), dt, sys.dim);
  for (double v : out)
    if (!std::isfinite(v)) throw TrajectoryDivergence(0, 1, theta);
  if (sys.box) out = reflect_into_box(out, *sys.box);
  return out;
}

InitSampler uniform_box_init(const BoxDomain& box) {
  validate(box);
  return [box](std::uint64_t traj, const Philox& rng, double* out) {
    const std::uint64_t stream = traj | (1ULL << 63);
    for (std::size_t i = 0; i < box.dim(); i += 2) {
      auto [u0, u1] = rng.uniforms(stream, i / 2);
      out[i] = box.lows[i] + (box.highs[i] - box.lows[i]) * u0;
      if (i + 1 < box.dim()) out[i + 1] = box.lows[i + 1] + (box.highs[i + 1] - box.lows[i + 1]) * u1;
    }
  };
}

InitSampler gaussian_init(std::vector<double> mean, std::vector<double> stddev) {
  require(mean.size() == stddev.size(), "mean and stddev lengths differ");
  return [mean = std::move(mean), stddev = std::move(stddev)](std::uint64_t traj, const Philox& rng, double* out) {
    const std::uint64_t stream = traj | (1ULL << 63);
    for (std::size_t i = 0; i < mean.size(); i += 2) {
      auto [z0, z1] = rng.normals(stream, i / 2);
      out[i] = mean[i] + stddev[i] * z0;
      if (i + 1 < mean.size()) out[i + 1] = mean[i + 1] + stddev[i + 1] * z1;
    }
  };
}

InitSampler point_init(std::vector<double> theta0) {
  return [theta0 = std::move(theta0)](std::uint64_t, const Philox&, double* out) {
    std::copy(theta0.begin(), theta0.end(), out);
  };
}

namespace {

// Integrates trajectories [first, first + count) with coordinate-major
// storage: coordinate c of local trajectory j lives at c * count + j.
void run_chunk(const LangevinSystem& sys, const InitSampler& init, const IntegratorConfig& cfg, const Philox& rng,
               std::size_t first, std::size_t count, std::size_t kept, SampleSet& out) {
  const std::size_t d = sys.dim;
  const std::size_t nblk = (d + 1) / 2;
  const auto& k = simd::active_kernels();
  std::vector<double> state(d * count), dr(d * count), scale(d * count), xi(d * count, 0.0);
  std::vector<double> tmp(d), gtmp(d);
  for (std::size_t j = 0; j < count; ++j) {
    init(first + j, rng, tmp.data());
    for (std::size_t c = 0; c < d; ++c) state[c * count + j] = tmp[c];
  }
  const bool noisy = std::isfinite(sys.beta);
  std::size_t kept_idx = 0;
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t c = 0; c < d; ++c) tmp[c] = state[c * count + j];
      drift(sys, tmp.data(), gtmp.data());
      const double sc = noise_scale(sys, tmp.data(), cfg.dt);
      for (std::size_t c = 0; c < d; ++c) {
        dr[c * count + j] = gtmp[c];
        scale[c * count + j] = sc;
      }
      if (noisy) {
        const std::uint64_t traj = first + j;
        for (std::size_t b = 0; b < nblk; ++b) {
          auto [z0, z1] = rng.normals(traj, (s - 1) * nblk + b);
          xi[(2 * b) * count + j] = z0;
          if (2 * b + 1 < d) xi[(2 * b + 1) * count + j] = z1;
        }
      }
    }
    k.em_update(state.data(), dr.data(), scale.data(), xi.data(), cfg.dt, d * count);
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t c = 0; c < d; ++c) {
        if (!std::isfinite(state[c * count + j])) {
          for (std::size_t cc = 0; cc < d; ++cc) tmp[cc] = state[cc * count + j];
          throw TrajectoryDivergence(first + j, s, tmp);
        }
      }
    }
    if (sys.box)
      for (std::size_t c = 0; c < d; ++c) k.fold_interval(state.data() + c * count, sys.box->lows[c], sys.box->highs[c], count);
    if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0 && kept_idx < kept) {
      for (std::size_t j = 0; j < count; ++j) {
        double* row = out.data.data() + ((first + j) * kept + kept_idx) * d;
        for (std::size_t c = 0; c < d; ++c) row[c] = state[c * count + j];
      }
      ++kept_idx;
    }
  }
}

}  // namespace

SampleSet simulate_ensemble(const LangevinSystem& sys, const InitSampler& init, const IntegratorConfig& cfg) {
  validate(sys);
  validate(cfg);
  const std::size_t kept = kept_per_trajectory(cfg);
  SampleSet out{sys.dim, cfg.n_traj * kept, {}};
  out.data.assign(out.rows * sys.dim, 0.0);
  if (kept == 0) return out;
  const Philox rng(cfg.seed);
  const std::size_t n_chunks = (cfg.n_traj + cfg.chunk - 1) / cfg.chunk;

  // Workers pull chunk indices; the first (lowest-index) divergence wins so
  // the reported error is deterministic too.
  std::mutex mu;
  std::size_t next = 0;
  std::size_t fail_chunk = n_chunks;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t ci;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n_chunks) return;
        ci = next++;
      }
      const std::size_t first = ci * cfg.chunk;
      const std::size_t count = std::min(cfg.chunk, cfg.n_traj - first);
      try {
        run_chunk(sys, init, cfg, rng, first, count, kept, out);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (ci < fail_chunk) {
          fail_chunk = ci;
          failure = std::current_exception();
        }
      }
    }
  };
  const std::size_t nw = std::min(cfg.workers, n_chunks);
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

std::size_t bin_of(double x, double lo, double hi, std::size_t bins) {
  const double u = (x - lo) / (hi - lo) * static_cast<double>(bins);
  auto b = static_cast<std::size_t>(u);
  return std::min(b, bins - 1);
}

}  // namespace

FiniteDistribution histogram(const SampleSet& samples, const BoxDomain& box, std::size_t bins_per_dim) {
  validate(box);
  require(samples.dim == box.dim(), "sample and box dimensions differ");
  require(samples.dim >= 1 && samples.dim <= 2, "histograms are supported for dim <= 2");
  require(bins_per_dim > 0, "need at least one bin");
  require(samples.rows > 0, "histogram of an empty sample set");
  const std::size_t nb = samples.dim == 1 ? bins_per_dim : bins_per_dim * bins_per_dim;
  std::vector<double> counts(nb, 0.0);
  for (std::size_t r = 0; r < samples.rows; ++r) {
    const double* x = samples.row(r);
    if (!box.contains(x))
      throw NumericalError("sample " + std::to_string(r) + " lies outside the box");
    std::size_t b = bin_of(x[0], box.lows[0], box.highs[0], bins_per_dim);
    if (samples.dim == 2) b = b * bins_per_dim + bin_of(x[1], box.lows[1], box.highs[1], bins_per_dim);
    counts[b] += 1.0;
  }
  return FiniteDistribution::normalized(std::move(counts));
}

FiniteDistribution bin_masses(const std::function<double(const double*)>& density, const BoxDomain& box,
                              std::size_t bins_per_dim, std::size_t nodes_per_bin) {
  validate(box);
  require(box.dim() <= 2, "bin masses are supported for dim <= 2");
  require(nodes_per_bin >= 3 && nodes_per_bin % 2 == 1, "nodes_per_bin must be odd and >= 3");
  const std::size_t dim = box.dim();
  const std::size_t q = nodes_per_bin;
  std::vector<double> sw(q);
  for (std::size_t i = 0; i < q; ++i) sw[i] = (i == 0 || i + 1 == q) ? 1.0 : (i % 2 ? 4.0 : 2.0);

  auto node = [&](std::size_t axis, std::size_t bin, std::size_t i) {
    const double w = (box.highs[axis] - box.lows[axis]) / static_cast<double>(bins_per_dim);
    return box.lows[axis] + w * (static_cast<double>(bin) + static_cast<double>(i) / static_cast<double>(q - 1));
  };
  auto step_of = [&](std::size_t axis) {
    return (box.highs[axis] - box.lows[axis]) / static_cast<double>(bins_per_dim) / static_cast<double>(q - 1);
  };

  std::vector<double> m;
  double x[2];
  if (dim == 1) {
    m.assign(bins_per_dim, 0.0);
    const double h = step_of(0);
    for (std::size_t b = 0; b < bins_per_dim; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        x[0] = node(0, b, i);
        s += sw[i] * density(x);
      }
      m[b] = s * h / 3.0;
    }
  } else {
    m.assign(bins_per_dim * bins_per_dim, 0.0);
    const double h0 = step_of(0), h1 = step_of(1);
    for (std::size_t b0 = 0; b0 < bins_per_dim; ++b0)
      for (std::size_t b1 = 0; b1 < bins_per_dim; ++b1) {
        double s = 0.0;
        for (std::size_t i = 0; i < q; ++i)
          for (std::size_t j = 0; j < q; ++j) {
            x[0] = node(0, b0, i);
            x[1] = node(1, b1, j);
            s += sw[i] * sw[j] * density(x);
          }
        m[b0 * bins_per_dim + b1] = s * h0 * h1 / 9.0;
      }
  }
  double total = 0.0;
  for (double v : m) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("density must be finite and nonnegative on the box");
    total += v;
  }
  if (!(total > 0.0)) throw ValidationError("density has zero total mass on the box");
  return FiniteDistribution::normalized(std::move(m));
}

DensityComparison compare_masses(const FiniteDistribution& hist, const FiniteDistribution& masses,
                                 std::size_t n_samples) {
  require(hist.size() == masses.size(), "histogram and mass vectors differ in length");
  require(n_samples > 0, "n_samples must be positive");
  double tv = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) tv += std::abs(hist[i] - masses[i]);
  tv *= 0.5;
  const double eps = 1.0 / (10.0 * static_cast<double>(n_samples));
  std::vector<double> h(hist.size()), m(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    h[i] = hist[i] + eps;
    m[i] = masses[i] + eps;
  }
  return {tv, kl(FiniteDistribution::normalized(h), FiniteDistribution::normalized(m))};
}

DensityComparison compare_density(const FiniteDistribution& hist, const std::function<double(const double*)>& density,
                                  const BoxDomain& box, std::size_t bins_per_dim, std::size_t n_samples) {
  return compare_masses(hist, bin_masses(density, box, bins_per_dim), n_samples);
}

}  // namespace gencert
