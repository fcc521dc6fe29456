#include <iostream>

#include "gencert/cli.hpp"
#include "gencert/error.hpp"
#include "gencert/langevin.hpp"
#include "gencert/simd/kernels.hpp"

namespace gencert::cli {

namespace detail {

long long Params::integer(const std::string& k) const { return j_.at(k).get<long long>(); }

std::size_t Params::size(const std::string& k) const {
  const long long v = integer(k);
  require(v >= 0, "parameter '" + k + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

double Params::real(const std::string& k) const { return io::to_double(j_.at(k)); }
std::string Params::text(const std::string& k) const { return j_.at(k).get<std::string>(); }
bool Params::flag(const std::string& k) const { return j_.at(k).get<bool>(); }

void CommandContext::write(const std::string& name, const std::string& content) {
  const auto path = out_dir / name;
  io::write_file(path, content);
  artifacts.push_back(path);
}

}  // namespace detail

namespace {

io::Json error_record(const char* kind, const std::string& what, int code) {
  return io::Json{{"error", kind}, {"message", what}, {"exit_code", code}};
}

}  // namespace

RunResult run(RunConfig cfg) {
  RunResult res;
  const auto& table = detail::command_table();
  auto it = table.find(cfg.command);
  io::Json manifest{{"command", cfg.command},
                    {"params", cfg.params},
                    {"seed", cfg.seed},
                    {"out_dir", cfg.out_dir.string()},
                    {"config_hash", io::hex64(config_hash(cfg))},
                    {"kernels", std::string(simd::active_kernels().name)}};
  try {
    require(it != table.end(), "unknown command '" + cfg.command + "'");
    io::write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
    res.artifacts.push_back(cfg.out_dir / "manifest.json");
    detail::CommandContext ctx{detail::Params(cfg.params), cfg.seed, cfg.out_dir, io::Json::object(), {}};
    it->second(ctx);
    res.summary = std::move(ctx.summary);
    res.artifacts.insert(res.artifacts.end(), ctx.artifacts.begin(), ctx.artifacts.end());
    return res;
  } catch (const ValidationError& e) {
    res.exit_code = 2;
    res.summary = error_record("validation", e.what(), 2);
  } catch (const TrajectoryDivergence& e) {
    res.exit_code = 3;
    res.summary = error_record("trajectory_divergence", e.what(), 3);
  } catch (const NumericalError& e) {
    res.exit_code = 3;
    res.summary = error_record("numerical", e.what(), 3);
  } catch (const io::Json::exception& e) {
    res.exit_code = 2;
    res.summary = error_record("validation", e.what(), 2);
  }
  try {
    io::write_file(cfg.out_dir / "error.json", res.summary.dump(2) + "\n");
    res.artifacts.push_back(cfg.out_dir / "error.json");
  } catch (const std::exception&) {
    // out_dir itself may be the problem; the caller still gets the record
  }
  return res;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const RunResult r = run(std::move(cfg));
  if (r.exit_code != 0) {
    err << "error: " << r.summary.value("message", std::string("unknown")) << "\n";
    return r.exit_code;
  }
  out << r.summary.dump(2) << "\n";
  return 0;
}

}  // namespace gencert::cli
