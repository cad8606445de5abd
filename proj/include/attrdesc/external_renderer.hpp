#pragma once

// Client side of the renderer wire protocol.

#include <chrono>
#include <memory>
#include <string>

#include "attrdesc/renderer.hpp"
#include "attrdesc/transport.hpp"

namespace attrdesc {

struct ExternalOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};  // per request, and for the handshake
};

/// One live protocol session. Render calls must be serialized by the caller.
class ExternalSession {
 public:
  /// `endpoint` is "tcp:HOST:PORT", "command:CMD", or a bare shell command.
  static std::unique_ptr<ExternalSession> open(const std::string& endpoint, const AttributeSchema& schema,
                                               ExternalOptions options = {});
  /// Takes an already-connected channel (used by tests and custom transports).
  static std::unique_ptr<ExternalSession> over(std::unique_ptr<LineChannel> channel,
                                               const AttributeSchema& schema, ExternalOptions options = {});
  ~ExternalSession();
  ExternalSession(const ExternalSession&) = delete;
  ExternalSession& operator=(const ExternalSession&) = delete;

  std::size_t feature_dim() const { return feature_dim_; }
  std::uint64_t last_id() const { return next_id_ - 1; }

  FeatureMatrix render(const SampleBatch& batch);
  /// Sends shutdown and reaps a spawned peer. Idempotent.
  void close();

 private:
  ExternalSession(std::unique_ptr<ChildProcess> child, std::unique_ptr<LineChannel> channel,
                  const AttributeSchema& schema, ExternalOptions options);
  LineChannel& channel();
  void handshake();

  std::unique_ptr<ChildProcess> child_;
  std::unique_ptr<LineChannel> owned_channel_;
  std::size_t attribute_count_;
  ExternalOptions options_;
  std::size_t feature_dim_ = 0;
  std::uint64_t next_id_ = 1;
  bool broken_ = false;
  bool closed_ = false;
};

class ExternalRenderer final : public Renderer {
 public:
  explicit ExternalRenderer(std::unique_ptr<ExternalSession> session) : session_(std::move(session)) {}
  std::size_t feature_dim() const override { return session_->feature_dim(); }
  FeatureMatrix render(const SampleBatch& batch, std::uint64_t /*seed*/) override {
    return session_->render(batch);
  }
  ExternalSession& session() { return *session_; }

 private:
  std::unique_ptr<ExternalSession> session_;
};

}  // namespace attrdesc
