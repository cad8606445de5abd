#include "attrdesc/protocol.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

#include "attrdesc/error.hpp"

namespace attrdesc::protocol {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& why) { throw ProtocolError("malformed message: " + why); }

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw ProtocolError("cannot encode non-finite number");
  // to_chars gives "-0", which a JSON reader may take as integer zero.
  if (v == 0.0 && std::signbit(v)) {
    out += "-0.0";
    return;
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_rows(std::string& out, const Matrix& m) {
  out += '[';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      append_number(out, m(r, c));
    }
    out += ']';
  }
  out += ']';
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t unsigned_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_unsigned()) malformed(std::string("field '") + key + "' must be an unsigned integer");
  return v.get<std::uint64_t>();
}

Matrix rows_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array of rows");
  if (v.empty()) return {};
  std::size_t cols = 0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array()) malformed(std::string("field '") + key + "' must be an array of rows");
    if (r == 0) cols = v[r].size();
    if (v[r].size() != cols) malformed(std::string("ragged rows in '") + key + "'");
  }
  Matrix m(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const json& x = v[r][c];
      if (!x.is_number()) malformed(std::string("non-numeric entry in '") + key + "'");
      m(r, c) = x.get<double>();
    }
  return m;
}

}  // namespace

std::string encode(const Message& message) {
  std::string out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          out = "{\"type\":\"hello\",\"version\":" + std::to_string(m.version) +
                ",\"feature_dim\":" + std::to_string(m.feature_dim) + "}";
        } else if constexpr (std::is_same_v<T, RenderRequest>) {
          out = "{\"type\":\"render\",\"id\":" + std::to_string(m.id) + ",\"samples\":";
          append_rows(out, m.samples);
          out += '}';
        } else if constexpr (std::is_same_v<T, Features>) {
          out = "{\"type\":\"features\",\"id\":" + std::to_string(m.id) + ",\"data\":";
          append_rows(out, m.data);
          out += '}';
        } else if constexpr (std::is_same_v<T, ErrorReply>) {
          out = "{\"type\":\"error\",\"id\":" + std::to_string(m.id) +
                ",\"message\":" + json(m.message).dump(-1, ' ', false, json::error_handler_t::replace) + "}";
        } else {
          out = "{\"type\":\"shutdown\"}";
        }
      },
      message);
  return out;
}

Message decode(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception&) {
    malformed("not valid JSON");
  }
  if (!obj.is_object()) malformed("not an object");
  const json& type = field(obj, "type");
  if (!type.is_string()) malformed("field 'type' must be a string");
  const auto& t = type.get_ref<const std::string&>();
  if (t == "hello") {
    const json& version = field(obj, "version");
    if (!version.is_number_integer()) malformed("field 'version' must be an integer");
    return Hello{version.get<std::int64_t>(), unsigned_field(obj, "feature_dim")};
  }
  if (t == "render") return RenderRequest{unsigned_field(obj, "id"), rows_field(obj, "samples")};
  if (t == "features") return Features{unsigned_field(obj, "id"), rows_field(obj, "data")};
  if (t == "error") {
    const json& msg = field(obj, "message");
    if (!msg.is_string()) malformed("field 'message' must be a string");
    return ErrorReply{unsigned_field(obj, "id"), msg.get<std::string>()};
  }
  if (t == "shutdown") return Shutdown{};
  malformed("unknown type '" + t + "'");
}

std::string_view type_name(const Message& message) {
  static constexpr std::string_view names[] = {"hello", "render", "features", "error", "shutdown"};
  return names[message.index()];
}

}  // namespace attrdesc::protocol
