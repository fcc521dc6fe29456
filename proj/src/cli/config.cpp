#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gencert/cli.hpp"
#include "gencert/error.hpp"
#include "gencert/extended_real.hpp"

namespace gencert::cli {

namespace {

using T = ParamType;

std::vector<ParamSpec> langevin_params(const std::string& dt, const std::string& n_traj,
                                       const std::string& steps, const std::string& burn_in,
                                       const std::string& thin) {
  return {
      {"dt", T::Real, dt, "Euler-Maruyama step"},
      {"n-traj", T::Int, n_traj, "ensemble size"},
      {"steps", T::Int, steps, "steps per trajectory"},
      {"burn-in", T::Int, burn_in, "steps discarded before sampling"},
      {"thin", T::Int, thin, "keep every thin-th step after burn-in"},
      {"workers", T::Int, "1", "worker threads (results do not depend on it)"},
  };
}

std::vector<CommandSpec> build_specs() {
  std::vector<CommandSpec> s;
  s.push_back({"second-law", "divergence traces of random finite chains against a stationary law",
               {{"n-max", T::Int, "20", "largest state count (n drawn from [2, n-max])"},
                {"trials", T::Int, "500", "number of random chains"},
                {"steps", T::Int, "100", "time steps T"},
                {"zero-prob", T::Real, "0.3", "probability that a kernel entry is zero"},
                {"trace-trial", T::Int, "0", "trial whose full traces go to trace.csv"}}});
  s.push_back({"gibbs-identity", "symmetric KL / D_inf identity for random Gibbs pairs",
               {{"n-max", T::Int, "50", "largest state count"},
                {"trials", T::Int, "500", "number of instances"},
                {"psi-max", T::Real, "5", "potentials drawn uniform in [0, psi-max]"}}});
  {
    CommandSpec c{"cld-box", "reflected Langevin in a 1D box versus its analytic stationary law",
                  {{"a", T::Real, "2", "loss L(x) = a x^2"},
                   {"lo", T::Real, "-1", "box lower edge"},
                   {"hi", T::Real, "1", "box upper edge"},
                   {"beta", T::Real, "4", "inverse temperature"},
                   {"diffusion", T::Text, "unit", "unit | linear | poly | exp"},
                   {"alpha", T::Real, "0.5", "noise-scale alpha"},
                   {"k", T::Int, "2", "polynomial noise exponent"},
                   {"bins", T::Int, "50", "histogram bins"},
                   {"n-grid", T::Int, "2001", "quadrature grid for the analytic density"},
                   {"dump-samples", T::Text, "none", "none | bin | csv"}}};
    for (auto& p : langevin_params("1e-3", "10000", "12000", "2000", "100")) c.params.push_back(p);
    s.push_back(std::move(c));
  }
  {
    CommandSpec c{"cld-reg", "unbounded Langevin with weight decay on L(x) = a (x - c)^2",
                  {{"a", T::Real, "1", "loss curvature"},
                   {"c", T::Real, "0.5", "loss minimizer"},
                   {"beta", T::Real, "4", "inverse temperature"},
                   {"lambda", T::Real, "1", "weight-decay precision"},
                   {"init-std", T::Real, "1", "initial N(0, init-std^2)"},
                   {"bins", T::Int, "50", "histogram bins over mean +- 6 sd"}}};
    for (auto& p : langevin_params("1e-3", "5000", "6000", "2000", "50")) c.params.push_back(p);
    s.push_back(std::move(c));
  }
  {
    CommandSpec c{"noise-scales", "stationary densities for state-dependent diffusion",
                  {{"a", T::Real, "2", "loss L(x) = a x^2"},
                   {"lo", T::Real, "-1", "box lower edge"},
                   {"hi", T::Real, "1", "box upper edge"},
                   {"beta", T::Real, "4", "inverse temperature"},
                   {"kinds", T::Text, "uniform,linear,poly,exp", "comma-separated noise kinds"},
                   {"alpha", T::Text, "1,0.5,0.5,1", "alpha per kind"},
                   {"k", T::Int, "2", "polynomial noise exponent"},
                   {"n-grid", T::Int, "2001", "quadrature grid"},
                   {"simulate", T::Bool, "false", "also run the Langevin ensemble per kind"},
                   {"bins", T::Int, "50", "histogram bins"}}};
    for (auto& p : langevin_params("1e-3", "10000", "12000", "2000", "100")) c.params.push_back(p);
    s.push_back(std::move(c));
  }
  s.push_back({"linreg", "ridge regression under CLD: closed forms, Monte Carlo, asymptotics",
               {{"n", T::Int, "200", "sample count N"},
                {"d", T::Int, "10", "dimension d"},
                {"sigma", T::Real, "0.5", "label-noise std"},
                {"lambda", T::Text, "d", "weight-decay precision; 'd' means lambda = d"},
                {"beta", T::Text, "100", "inverse temperature (number, xN or inf)"},
                {"mc-samples", T::Int, "100000", "Monte Carlo draws"},
                {"init-samples", T::Int, "10000", "draws for E_p0 L_S"},
                {"delta", T::Real, "0.01", "confidence for the bound column"},
                {"sde", T::Bool, "false", "also run the SDE oracle"},
                {"sde-dt", T::Real, "0.01", "SDE oracle step"},
                {"sweep", T::Text, "", "key-value grid manifest (keys n, d, sigma, lambda, beta, seed)"}}});
  s.push_back({"parity-train", "SGLD on the parity task with a generalization certificate",
               {{"d", T::Int, "16", "input bits"},
                {"k", T::Int, "3", "parity order"},
                {"n", T::Int, "4000", "training set size"},
                {"n-test", T::Int, "2000", "held-out set size"},
                {"dims", T::Text, "16,64,64,1", "layer widths"},
                {"beta-sweep", T::Text, "0.15N,0.4N,0.7N,2N,inf", "inverse temperatures"},
                {"delta", T::Real, "0.01", "certificate confidence"},
                {"seeds", T::Int, "1", "training seeds per beta"},
                {"lr", T::Real, "0.05", "step size"},
                {"batch-size", T::Int, "32", "minibatch size"},
                {"epochs", T::Int, "300", "passes over the data"},
                {"lambda", T::Real, "1", "weight-decay multiplier of fan_in"},
                {"n-init", T::Int, "100", "initializations for E_p0 L_S"},
                {"out", T::Text, "report.csv", "report file name inside out-dir"}}});
  s.push_back({"bounds", "generalization-gap bound calculators",
               {{"beta", T::Text, "0.4N", "inverse temperature (number, xN or inf)"},
                {"init-loss", T::Real, "0.693", "E_p0 L_S (or its sup in single mode)"},
                {"n", T::Int, "4000", "sample count N"},
                {"delta", T::Real, "0.01", "confidence"},
                {"mode", T::Text, "mean", "mean | single"},
                {"vol-ratio", T::Real, "1", "|Theta| / |Theta0| for box initialization"},
                {"kl-init", T::Real, "0", "KL(p0 || nu)"},
                {"dinf-init", T::Real, "0", "D_inf(p0 || nu)"},
                {"mean-potential", T::Real, "0", "E_p0 Psi"},
                {"sup-potential", T::Real, "0", "sup_p0 Psi"},
                {"empirical-error", T::Real, "-1", "train error for the kl-form bounds (< 0 disables)"}}});
  s.push_back({"counterexample", "three-state memorization chain", {{"n", T::Int, "1000", "sample size"}}});
  s.push_back({"shatter", "ReLU network shattering m points with margin 1",
               {{"m", T::Int, "36", "number of points (perfect square)"},
                {"l-amp", T::Int, "8", "amplification layers"},
                {"labels", T::Text, "random", "random | alternating | zeros | ones | explicit 0/1 string"},
                {"exhaustive", T::Int, "0", "also check all labelings of the first K points"}}});
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_real(const std::string& name, const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ValidationError("parameter '" + name + "' expects a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& name, const std::string& s) {
  const double v = parse_real(name, s);
  if (!std::isfinite(v) || std::floor(v) != v || std::abs(v) > 9.0e15)
    throw ValidationError("parameter '" + name + "' expects an integer, got '" + s + "'");
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& name, const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError("parameter '" + name + "' expects true/false, got '" + s + "'");
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : command_specs())
    if (c.name == name) return c;
  throw ValidationError("unknown command '" + name + "'");
}

io::Json resolve_params(const std::string& command, const std::map<std::string, std::string>& given) {
  const CommandSpec& spec = find_command(command);
  for (const auto& [k, v] : given) {
    const bool known = std::any_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.name == k; });
    if (!known) throw ValidationError("unknown parameter '" + k + "' for command '" + command + "'");
  }
  io::Json out = io::Json::object();
  for (const auto& p : spec.params) {
    auto it = given.find(p.name);
    const std::string& raw = it == given.end() ? p.fallback : it->second;
    switch (p.type) {
      case ParamType::Int: out[p.name] = parse_int(p.name, raw); break;
      case ParamType::Real: out[p.name] = io::number(parse_real(p.name, raw)); break;
      case ParamType::Bool: out[p.name] = parse_bool(p.name, raw); break;
      case ParamType::Text: out[p.name] = raw; break;
    }
  }
  return out;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Generalization-gap certificates for Markov-process training", "gencert"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string seed_str = "0";
  std::string out_dir;
  app.add_option("--seed", seed_str, "64-bit seed");
  app.add_option("--out-dir", out_dir, "artifact directory (default: $GENCERT_OUT_DIR or ./gencert-out)");
  app.set_config("--config", "", "key-value config file with one [section] per command");

  struct Bound {
    CLI::App* sub;
    std::map<std::string, std::pair<CLI::Option*, std::string>> opts;
  };
  std::vector<Bound> bound;
  bound.reserve(command_specs().size());
  for (const auto& c : command_specs()) {
    Bound b{app.add_subcommand(c.name, c.help), {}};
    for (const auto& p : c.params) {
      auto& slot = b.opts[p.name];
      slot.second = p.fallback;
      slot.first = b.sub->add_option("--" + p.name, slot.second, p.help)->capture_default_str();
    }
    bound.push_back(std::move(b));
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested(os.str());
  } catch (const CLI::ParseError& e) {
    throw ValidationError(std::string("command line: ") + e.what());
  }

  RunConfig cfg;
  for (auto& b : bound) {
    if (!b.sub->parsed()) continue;
    cfg.command = b.sub->get_name();
    std::map<std::string, std::string> given;
    for (auto& [name, slot] : b.opts)
      if (slot.first->count() > 0) given[name] = slot.second;
    cfg.params = resolve_params(cfg.command, given);
  }
  if (cfg.command.empty()) throw ValidationError("no command given");
  const std::string seed_t = trim(seed_str);
  std::size_t used = 0;
  try {
    require(!seed_t.empty() && seed_t[0] != '-', "bad seed");
    cfg.seed = static_cast<std::uint64_t>(std::stoull(seed_t, &used));
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != seed_t.size()) throw ValidationError("--seed must be an unsigned 64-bit integer");
  if (out_dir.empty()) {
    const char* env = std::getenv("GENCERT_OUT_DIR");
    out_dir = env && *env ? env : "gencert-out";
  }
  cfg.out_dir = out_dir;
  return cfg;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  io::Json j;
  j["command"] = cfg.command;
  j["params"] = cfg.params;
  j["seed"] = cfg.seed;
  return io::fnv1a(j.dump());
}

double parse_beta(const std::string& expr, double n) {
  std::string t = trim(expr);
  require(!t.empty(), "empty beta expression");
  if (t == "inf" || t == "+inf") return kInf;
  double v;
  if (t.back() == 'N') {
    t.pop_back();
    v = (t.empty() ? 1.0 : parse_real("beta", t)) * n;
  } else {
    v = parse_real("beta", t);
  }
  require(v > 0.0 && !std::isnan(v), "beta must be positive, got '" + expr + "'");
  return v;
}

std::vector<double> parse_beta_list(const std::string& list, double n) {
  std::vector<double> out;
  for (const auto& e : split(list, ',')) out.push_back(parse_beta(e, n));
  require(!out.empty(), "empty beta list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& list) {
  std::vector<std::size_t> out;
  for (const auto& e : split(list, ',')) {
    const long long v = parse_int("list", e);
    require(v > 0, "list entries must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  require(!out.empty(), "empty list");
  return out;
}

std::vector<std::map<std::string, std::string>> parse_sweep_manifest(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("sweep manifest line " + std::to_string(lineno) + ": expected key = values");
    const std::string key = trim(line.substr(0, eq));
    auto vals = split(line.substr(eq + 1), ',');
    vals.erase(std::remove(vals.begin(), vals.end(), std::string()), vals.end());
    if (key.empty() || vals.empty()) throw ValidationError("sweep manifest line " + std::to_string(lineno) + ": empty key or values");
    for (const auto& a : axes)
      if (a.first == key) throw ValidationError("sweep manifest repeats key '" + key + "'");
    axes.emplace_back(key, std::move(vals));
  }
  std::vector<std::map<std::string, std::string>> grid{{}};
  for (const auto& [key, vals] : axes) {
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& g : grid)
      for (const auto& v : vals) {
        auto m = g;
        m[key] = v;
        next.push_back(std::move(m));
      }
    grid = std::move(next);
  }
  return grid;
}

}  // namespace gencert::cli
