#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gencert/bounds.hpp"
#include "gencert/divergence.hpp"
#include "gencert/langevin.hpp"
#include "gencert/markov.hpp"
#include "gencert/mlp.hpp"
#include "gencert/stationary.hpp"

namespace gencert::io {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_double(double v);

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

// RFC 4180: fields with comma, quote, CR or LF are quoted, quotes doubled;
// lines end in CRLF.
std::string csv_field(std::string_view s);
std::string csv_line(const std::vector<std::string>& fields);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Doubles go to JSON as numbers when finite and as the strings "inf"/"-inf"
// otherwise (JSON has no infinity).
Json number(double v);
double to_double(const Json& j);

Json to_json(const FiniteDistribution& p);
FiniteDistribution distribution_from_json(const Json& j);
Json to_json(const TransitionKernel& k);
TransitionKernel kernel_from_json(const Json& j);
Json to_json(const MlpParams& net);
MlpParams mlp_from_json(const Json& j);
Json to_json(const BoundReport& r);

// Sample dump: "GCSAMP01", then little-endian u64 dim, count, seed,
// config hash, then count * dim little-endian f64 values, row-major.
struct SampleFileHeader {
  std::uint64_t dim, count, seed, cfg_hash;
};

void write_samples_binary(const std::filesystem::path& path, const SampleSet& s, std::uint64_t seed,
                          std::uint64_t cfg_hash);
SampleSet read_samples_binary(const std::filesystem::path& path, SampleFileHeader* header = nullptr);
std::string samples_csv(const SampleSet& s);

// Two columns x, p(x).
std::string density_csv(const GridDensity& d);

}  // namespace gencert::io
