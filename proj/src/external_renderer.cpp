#include "attrdesc/external_renderer.hpp"

#include "attrdesc/config.hpp"
#include "attrdesc/error.hpp"
#include "attrdesc/protocol.hpp"

namespace attrdesc {

namespace proto = protocol;

std::unique_ptr<ExternalSession> ExternalSession::open(const std::string& endpoint, const AttributeSchema& schema,
                                                       ExternalOptions options) {
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ConfigError("tcp endpoint must be tcp:HOST:PORT");
    const auto port = parse_unsigned(rest.substr(colon + 1), "tcp port");
    if (port == 0 || port > 65535) throw ConfigError("tcp port out of range");
    auto channel = tcp_connect(rest.substr(0, colon), static_cast<std::uint16_t>(port), options.timeout);
    return over(std::move(channel), schema, options);
  }
  std::string command = endpoint.rfind("command:", 0) == 0 ? endpoint.substr(8) : endpoint;
  if (trim(command).empty()) throw ConfigError("empty renderer command");
  auto child = std::make_unique<ChildProcess>(command);
  std::unique_ptr<ExternalSession> session(new ExternalSession(std::move(child), nullptr, schema, options));
  try {
    session->handshake();
  } catch (...) {
    session->broken_ = true;
    session->close();
    throw;
  }
  return session;
}

std::unique_ptr<ExternalSession> ExternalSession::over(std::unique_ptr<LineChannel> channel,
                                                       const AttributeSchema& schema, ExternalOptions options) {
  std::unique_ptr<ExternalSession> session(new ExternalSession(nullptr, std::move(channel), schema, options));
  session->handshake();
  return session;
}

ExternalSession::ExternalSession(std::unique_ptr<ChildProcess> child, std::unique_ptr<LineChannel> channel,
                                 const AttributeSchema& schema, ExternalOptions options)
    : child_(std::move(child)),
      owned_channel_(std::move(channel)),
      attribute_count_(schema.attribute_count()),
      options_(options) {}

ExternalSession::~ExternalSession() {
  try {
    close();
  } catch (...) {
  }
}

LineChannel& ExternalSession::channel() { return child_ ? child_->channel() : *owned_channel_; }

void ExternalSession::handshake() {
  const auto line = channel().read_line(options_.timeout);
  if (!line) throw ProtocolError("peer closed before hello");
  const proto::Message msg = proto::decode(*line);
  const auto* hello = std::get_if<proto::Hello>(&msg);
  if (!hello) throw ProtocolError("malformed message: expected hello, got " + std::string(proto::type_name(msg)));
  if (hello->version != proto::kVersion)
    throw ProtocolError("handshake version mismatch: peer speaks " + std::to_string(hello->version) +
                        ", client " + std::to_string(proto::kVersion));
  if (hello->feature_dim == 0) throw ProtocolError("malformed message: feature_dim is zero");
  feature_dim_ = hello->feature_dim;
}

FeatureMatrix ExternalSession::render(const SampleBatch& batch) {
  if (closed_) throw ProtocolError("session closed");
  if (broken_) throw ProtocolError("session unusable after an earlier protocol failure");
  if (batch.samples.cols() != attribute_count_)
    throw RendererError("schema mismatch: batch has " + std::to_string(batch.samples.cols()) +
                        " attributes, session expects " + std::to_string(attribute_count_));
  const std::uint64_t id = next_id_++;
  try {
    channel().write_line(proto::encode(proto::RenderRequest{id, batch.samples}));
    const auto line = channel().read_line(options_.timeout);
    if (!line) throw ProtocolError("peer closed the stream");
    const proto::Message msg = proto::decode(*line);
    if (const auto* err = std::get_if<proto::ErrorReply>(&msg)) {
      if (err->id != id) throw ProtocolError("protocol desync");
      throw PeerError(err->message);
    }
    const auto* features = std::get_if<proto::Features>(&msg);
    if (!features) throw ProtocolError("malformed message: expected features, got " + std::string(proto::type_name(msg)));
    if (features->id != id) throw ProtocolError("protocol desync");
    if (features->data.rows() != batch.size() || features->data.cols() != feature_dim_)
      throw ProtocolError("malformed message: features shape " + std::to_string(features->data.rows()) + "x" +
                          std::to_string(features->data.cols()) + ", expected " + std::to_string(batch.size()) +
                          "x" + std::to_string(feature_dim_));
    return features->data;
  } catch (const PeerError&) {
    // A well-formed error reply leaves the stream in sync.
    throw;
  } catch (...) {
    broken_ = true;
    throw;
  }
}

void ExternalSession::close() {
  if (closed_) return;
  closed_ = true;
  if (!broken_) {
    try {
      channel().write_line(proto::encode(proto::Shutdown{}));
    } catch (const ProtocolError&) {
    }
  }
  if (child_) {
    child_->reap(std::chrono::milliseconds(5000));
  } else if (owned_channel_) {
    owned_channel_->close_write();
  }
}

}  // namespace attrdesc
