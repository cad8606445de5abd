#include "attrdesc/oracle_peer.hpp"

#include <chrono>

#include "attrdesc/error.hpp"
#include "attrdesc/protocol.hpp"
#include "attrdesc/rng.hpp"

namespace attrdesc {

namespace proto = protocol;

std::uint64_t peer_noise_seed(std::uint64_t seed, std::uint64_t request_id) {
  return derive_seed(seed, {request_id});
}

std::size_t serve_oracle(LineChannel& channel, OracleRenderer& renderer, const PeerOptions& options) {
  const std::int64_t version = options.fault == PeerFault::bad_version ? 2 : proto::kVersion;
  channel.write_line(proto::encode(proto::Hello{version, renderer.feature_dim()}));
  const std::size_t n_attributes = renderer.config().schema.attribute_count();
  std::size_t served = 0;
  std::uint64_t last_id = 0;
  bool seen_request = false;
  const auto reply_error = [&](std::uint64_t id, const std::string& message) {
    channel.write_line(proto::encode(proto::ErrorReply{id, message}));
  };

  for (;;) {
    std::optional<std::string> line;
    try {
      line = channel.read_line(std::chrono::hours(24 * 365));
    } catch (const ProtocolError& e) {
      // Oversized line: reply and drop the connection, the stream cannot be resynchronized.
      reply_error(0, e.what());
      return served;
    }
    if (!line) return served;
    if (line->empty()) continue;

    proto::Message msg;
    try {
      msg = proto::decode(*line);
    } catch (const ProtocolError& e) {
      reply_error(0, e.what());
      continue;
    }
    if (std::holds_alternative<proto::Shutdown>(msg)) return served;
    const auto* request = std::get_if<proto::RenderRequest>(&msg);
    if (!request) {
      reply_error(0, "unexpected message type '" + std::string(proto::type_name(msg)) + "'");
      continue;
    }
    const std::uint64_t id = request->id;
    if (seen_request && id <= last_id) {
      reply_error(id, "non-increasing request id " + std::to_string(id));
      continue;
    }
    seen_request = true;
    last_id = id;

    if (options.fault == PeerFault::silent) continue;
    if (options.fault == PeerFault::garbage) {
      channel.write_line("this is not a protocol message");
      continue;
    }
    if (options.fault == PeerFault::always_error) {
      reply_error(id, options.fault_message);
      continue;
    }
    if (request->samples.rows() == 0) {
      reply_error(id, "empty batch");
      continue;
    }
    if (request->samples.rows() > options.max_batch) {
      reply_error(id, "batch of " + std::to_string(request->samples.rows()) + " rows exceeds limit " +
                          std::to_string(options.max_batch));
      continue;
    }
    if (request->samples.cols() != n_attributes) {
      reply_error(id, "expected N=" + std::to_string(n_attributes) + " attributes");
      continue;
    }
    FeatureMatrix features;
    try {
      features = renderer.render(SampleBatch{request->samples, 0}, peer_noise_seed(options.seed, id));
    } catch (const Error& e) {
      reply_error(id, e.what());
      continue;
    }
    if (options.fault == PeerFault::short_rows) {
      Matrix trimmed(features.rows() - 1, features.cols());
      std::copy(features.data(), features.data() + trimmed.rows() * trimmed.cols(), trimmed.data());
      features = std::move(trimmed);
    }
    const std::uint64_t reply_id = options.fault == PeerFault::desync ? id + 1 : id;
    channel.write_line(proto::encode(proto::Features{reply_id, std::move(features)}));
    ++served;
  }
}

}  // namespace attrdesc
