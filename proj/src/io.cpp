#include "gencert/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gencert/error.hpp"

namespace gencert::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

void CsvTable::add(std::vector<std::string> row) {
  require(row.size() == header_.size(), "CSV row width differs from the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out = csv_line(header_);
  for (const auto& r : rows_) out += csv_line(r);
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw ValidationError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError("expected a number, got " + j.dump());
}

Json to_json(const FiniteDistribution& p) {
  Json a = Json::array();
  for (double v : p.probs()) a.push_back(v);
  return a;
}

FiniteDistribution distribution_from_json(const Json& j) {
  require(j.is_array(), "distribution must be a JSON array");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(to_double(e));
  return FiniteDistribution(std::move(v));
}

Json to_json(const TransitionKernel& k) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < k.size(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < k.size(); ++j) r.push_back(k(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

TransitionKernel kernel_from_json(const Json& j) {
  require(j.is_array(), "kernel must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    require(r.is_array(), "kernel rows must be arrays");
    std::vector<double> row;
    for (const auto& e : r) row.push_back(to_double(e));
    rows.push_back(std::move(row));
  }
  return TransitionKernel::from_rows(rows);
}

Json to_json(const MlpParams& net) {
  Json j;
  j["layer_dims"] = net.dims();
  Json layers = Json::array();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    Json layer;
    Json w = Json::array();
    for (std::size_t o = 0; o < net.fan_out(l); ++o) {
      Json row = Json::array();
      for (std::size_t i = 0; i < net.fan_in(l); ++i) row.push_back(net.weights(l)[o * net.fan_in(l) + i]);
      w.push_back(std::move(row));
    }
    layer["weights"] = std::move(w);
    Json b = Json::array();
    for (std::size_t o = 0; o < net.fan_out(l); ++o) b.push_back(net.biases(l)[o]);
    layer["biases"] = std::move(b);
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j;
}

MlpParams mlp_from_json(const Json& j) {
  MlpParams net(j.at("layer_dims").get<std::vector<std::size_t>>());
  const auto& layers = j.at("layers");
  require(layers.size() == net.layers(), "layer count does not match layer_dims");
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& w = layers[l].at("weights");
    const auto& b = layers[l].at("biases");
    require(w.size() == net.fan_out(l) && b.size() == net.fan_out(l), "layer shape mismatch");
    for (std::size_t o = 0; o < net.fan_out(l); ++o) {
      require(w[o].size() == net.fan_in(l), "layer shape mismatch");
      for (std::size_t i = 0; i < net.fan_in(l); ++i) net.w(l, o, i) = w[o][i].get<double>();
      net.b(l, o) = b[o].get<double>();
    }
  }
  return net;
}

Json to_json(const BoundReport& r) {
  Json j;
  Json in;
  in["N"] = r.inputs.n;
  in["delta"] = r.inputs.delta;
  in["kl_init"] = r.inputs.kl_init;
  in["dinf_init"] = r.inputs.dinf_init;
  in["mean_potential"] = r.inputs.mean_potential;
  in["sup_potential"] = r.inputs.sup_potential;
  j["inputs"] = std::move(in);
  j["bound_mean"] = number(r.bound_mean);
  j["bound_single"] = number(r.bound_single);
  if (r.empirical_error) j["empirical_error"] = *r.empirical_error;
  if (r.bound_fast_mean) j["bound_fast_mean"] = number(*r.bound_fast_mean);
  if (r.bound_fast_single) j["bound_fast_single"] = number(*r.bound_fast_single);
  return j;
}

namespace {

constexpr char kMagic[8] = {'G', 'C', 'S', 'A', 'M', 'P', '0', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw ValidationError("truncated sample file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

}  // namespace

void write_samples_binary(const std::filesystem::path& path, const SampleSet& s, std::uint64_t seed,
                          std::uint64_t cfg_hash) {
  std::string out(kMagic, 8);
  put_u64(out, s.dim);
  put_u64(out, s.rows);
  put_u64(out, seed);
  put_u64(out, cfg_hash);
  out.reserve(out.size() + s.data.size() * 8);
  for (double v : s.data) put_u64(out, std::bit_cast<std::uint64_t>(v));
  write_file(path, out);
}

SampleSet read_samples_binary(const std::filesystem::path& path, SampleFileHeader* header) {
  const std::string in = read_file(path);
  if (in.size() < 8 || std::memcmp(in.data(), kMagic, 8) != 0) throw ValidationError("not a sample file");
  std::size_t pos = 8;
  SampleFileHeader h{};
  h.dim = get_u64(in, pos);
  h.count = get_u64(in, pos);
  h.seed = get_u64(in, pos);
  h.cfg_hash = get_u64(in, pos);
  if (in.size() != pos + h.dim * h.count * 8) throw ValidationError("sample file size does not match its header");
  SampleSet s{h.dim, h.count, {}};
  s.data.resize(h.dim * h.count);
  for (auto& v : s.data) v = std::bit_cast<double>(get_u64(in, pos));
  if (header) *header = h;
  return s;
}

std::string samples_csv(const SampleSet& s) {
  std::vector<std::string> head;
  for (std::size_t c = 0; c < s.dim; ++c) head.push_back("theta" + std::to_string(c));
  CsvTable t(head);
  for (std::size_t r = 0; r < s.rows; ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < s.dim; ++c) row.push_back(format_double(s.row(r)[c]));
    t.add(std::move(row));
  }
  return t.str();
}

std::string density_csv(const GridDensity& d) {
  CsvTable t({"x", "p"});
  for (std::size_t i = 0; i < d.x.size(); ++i) t.add({format_double(d.x[i]), format_double(d.p[i])});
  return t.str();
}

}  // namespace gencert::io
