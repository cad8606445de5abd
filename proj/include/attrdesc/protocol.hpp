#pragma once

// Renderer wire protocol, version 1. One JSON object per line:
//   peer -> client  {"type":"hello","version":1,"feature_dim":D}
//   client -> peer  {"type":"render","id":k,"samples":[[a1,...,aN],...]}
//   peer -> client  {"type":"features","id":k,"data":[[f1,...,fD],...]}
//                   {"type":"error","id":k,"message":"..."}
//   client -> peer  {"type":"shutdown"}
// Numbers are written in shortest round-trip form, so decode(encode(m)) == m.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "attrdesc/matrix.hpp"

namespace attrdesc::protocol {

inline constexpr std::int64_t kVersion = 1;

struct Hello {
  std::int64_t version = kVersion;
  std::uint64_t feature_dim = 0;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct RenderRequest {
  std::uint64_t id = 0;
  Matrix samples;
  friend bool operator==(const RenderRequest&, const RenderRequest&) = default;
};

struct Features {
  std::uint64_t id = 0;
  Matrix data;
  friend bool operator==(const Features&, const Features&) = default;
};

struct ErrorReply {
  std::uint64_t id = 0;
  std::string message;
  friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

struct Shutdown {
  friend bool operator==(const Shutdown&, const Shutdown&) = default;
};

using Message = std::variant<Hello, RenderRequest, Features, ErrorReply, Shutdown>;

/// Single line, no trailing newline. Throws ProtocolError for non-finite numbers.
std::string encode(const Message& message);
/// Throws ProtocolError("malformed message: ...") on anything that is not a valid message.
Message decode(std::string_view line);

std::string_view type_name(const Message& message);

}  // namespace attrdesc::protocol
