#include "attrdesc/stats_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "attrdesc/error.hpp"

namespace attrdesc {
namespace {

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

double get_f64(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

struct Framed {
  nlohmann::json header;
  std::size_t payload_offset = 0;
};

Framed split_frame(const std::string& bytes, std::string_view magic) {
  if (bytes.compare(0, magic.size(), magic) != 0) throw FormatError("unrecognized format");
  const auto eol = bytes.find('\n', magic.size());
  if (eol == std::string::npos) throw FormatError("truncated payload");
  Framed f;
  try {
    f.header = nlohmann::json::parse(bytes.substr(magic.size(), eol - magic.size()));
  } catch (const nlohmann::json::exception&) {
    throw FormatError("malformed header");
  }
  if (!f.header.is_object()) throw FormatError("malformed header");
  if (f.header.value("dtype", "") != "f64") throw FormatError("unsupported dtype");
  f.payload_offset = eol + 1;
  return f;
}

std::size_t header_size(const nlohmann::json& header, const char* key) {
  const auto it = header.find(key);
  if (it == header.end() || !it->is_number_unsigned())
    throw FormatError(std::string("header field '") + key + "' missing or not an unsigned integer");
  return it->get<std::size_t>();
}

void check_payload(const std::string& bytes, std::size_t offset, std::size_t values) {
  const std::size_t have = bytes.size() - offset;
  if (have < values * 8) throw FormatError("truncated payload");
  if (have > values * 8) throw FormatError("payload longer than header declares");
}

}  // namespace

std::string encode_features(const FeatureMatrix& features) {
  std::string out(kFeatureMagic);
  out += "{\"rows\":" + std::to_string(features.rows()) + ",\"dim\":" + std::to_string(features.cols()) +
         ",\"dtype\":\"f64\"}\n";
  out.reserve(out.size() + features.values().size() * 8);
  for (double v : features.values()) put_f64(out, v);
  return out;
}

FeatureMatrix decode_features(const std::string& bytes) {
  const Framed f = split_frame(bytes, kFeatureMagic);
  const std::size_t rows = header_size(f.header, "rows");
  const std::size_t dim = header_size(f.header, "dim");
  if (rows == 0 || dim == 0) throw FormatError("dim/count inconsistency");
  check_payload(bytes, f.payload_offset, rows * dim);
  FeatureMatrix m(rows, dim);
  for (std::size_t i = 0; i < rows * dim; ++i) m.data()[i] = get_f64(bytes, f.payload_offset + 8 * i);
  return m;
}

std::string encode_stats(const FeatureStats& stats) {
  std::string out(kStatsMagic);
  out += "{\"dim\":" + std::to_string(stats.dim()) + ",\"count\":" + std::to_string(stats.count) +
         ",\"dtype\":\"f64\"}\n";
  for (double v : stats.mean) put_f64(out, v);
  for (double v : stats.cov.values()) put_f64(out, v);
  return out;
}

FeatureStats decode_stats(const std::string& bytes) {
  const Framed f = split_frame(bytes, kStatsMagic);
  const std::size_t dim = header_size(f.header, "dim");
  const std::size_t count = header_size(f.header, "count");
  if (dim == 0 || count < 2) throw FormatError("dim/count inconsistency");
  check_payload(bytes, f.payload_offset, dim + dim * dim);
  FeatureStats s;
  s.count = count;
  s.mean.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) s.mean[i] = get_f64(bytes, f.payload_offset + 8 * i);
  s.cov = Matrix(dim, dim);
  const std::size_t cov_offset = f.payload_offset + 8 * dim;
  for (std::size_t i = 0; i < dim * dim; ++i) s.cov.data()[i] = get_f64(bytes, cov_offset + 8 * i);
  return s;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_features(const FeatureMatrix& features, const std::filesystem::path& path) {
  write_file_bytes(path, encode_features(features));
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  return decode_features(read_file_bytes(path));
}

void write_stats(const FeatureStats& stats, const std::filesystem::path& path) {
  write_file_bytes(path, encode_stats(stats));
}

FeatureStats read_stats(const std::filesystem::path& path) { return decode_stats(read_file_bytes(path)); }

FeatureStats read_stats_or_features(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.compare(0, kFeatureMagic.size(), kFeatureMagic) == 0)
    return accumulate_stats(decode_features(bytes));
  return decode_stats(bytes);
}

}  // namespace attrdesc
