#include <doctest.h>

#include <sys/socket.h>

#include <thread>

#include "attrdesc/error.hpp"
#include "attrdesc/external_renderer.hpp"
#include "attrdesc/oracle_peer.hpp"
#include "attrdesc/protocol.hpp"
#include "support.hpp"

using namespace attrdesc;
using namespace std::chrono_literals;

namespace {

const std::string kOracleConfig = test::profile_path("oracle-vehiclex5.ini").string();

std::string peer_command(const std::string& extra = "") {
  return std::string("command:") + ATTRDESC_PEER_PATH + " -c " + kOracleConfig + " " + extra;
}

std::pair<std::unique_ptr<FdChannel>, std::unique_ptr<FdChannel>> channel_pair() {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  return {std::make_unique<FdChannel>(fds[0], fds[0]), std::make_unique<FdChannel>(fds[1], fds[1])};
}

SampleBatch some_batch(std::size_t n, std::uint64_t seed) {
  const auto s = test::vehiclex5();
  return sample_batch(s, default_params(s), n, seed);
}

}  // namespace

TEST_CASE("subprocess peer: handshake and loopback equivalence") {
  const auto schema = test::vehiclex5();
  const auto cfg = load_oracle_config(kOracleConfig);
  auto session = ExternalSession::open(peer_command("--seed 99"), schema);
  CHECK(session->feature_dim() == 8);
  for (std::uint64_t r = 1; r <= 3; ++r) {
    const auto batch = some_batch(50 * r, r);
    const auto remote = session->render(batch);
    CHECK(session->last_id() == r);
    const auto local = oracle_render(cfg, batch, peer_noise_seed(99, r));
    REQUIRE(remote.rows() == local.rows());
    CHECK(test::max_abs_diff(remote, local) <= 1e-12);
    CHECK(remote == local);  // shortest round-trip text preserves every bit
  }
  session->close();
  session->close();
  CHECK_THROWS_AS(session->render(some_batch(2, 1)), ProtocolError);
}

TEST_CASE("subprocess peer: fault handling") {
  const auto schema = test::vehiclex5();
  ExternalOptions quick;
  quick.timeout = 300ms;

  SUBCASE("desync") {
    auto s = ExternalSession::open(peer_command("--fault desync"), schema);
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), "protocol desync", ProtocolError);
    CHECK_THROWS_AS(s->render(some_batch(4, 1)), ProtocolError);
  }
  SUBCASE("peer error is surfaced verbatim and the session stays usable") {
    auto s = ExternalSession::open(peer_command("--fault error --fault-message 'asset missing'"), schema);
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), "asset missing", PeerError);
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), "asset missing", PeerError);
    CHECK(s->last_id() == 2);
  }
  SUBCASE("version mismatch") {
    CHECK_THROWS_WITH_AS(ExternalSession::open(peer_command("--fault bad-version"), schema),
                         doctest::Contains("handshake version mismatch"), ProtocolError);
  }
  SUBCASE("garbage reply") {
    auto s = ExternalSession::open(peer_command("--fault garbage"), schema);
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), doctest::Contains("malformed message"), ProtocolError);
  }
  SUBCASE("short reply") {
    auto s = ExternalSession::open(peer_command("--fault short"), schema);
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), doctest::Contains("malformed message"), ProtocolError);
  }
  SUBCASE("silent peer times out") {
    auto s = ExternalSession::open(peer_command("--fault silent"), schema, quick);
    const auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_WITH_AS(s->render(some_batch(4, 1)), doctest::Contains("timeout"), ProtocolError);
    CHECK(std::chrono::steady_clock::now() - t0 < 5s);
  }
  SUBCASE("peer that exits immediately") {
    CHECK_THROWS_WITH_AS(ExternalSession::open("command:true", schema, quick),
                         doctest::Contains("peer closed before hello"), ProtocolError);
  }
  SUBCASE("peer-side validation errors") {
    auto s = ExternalSession::open(peer_command("--max-batch 10"), schema);
    CHECK_THROWS_WITH_AS(s->render(some_batch(11, 1)), doctest::Contains("exceeds limit"), PeerError);
    CHECK(s->render(some_batch(10, 1)).rows() == 10);
  }
  SUBCASE("client-side shape check") {
    auto s = ExternalSession::open(peer_command(), schema);
    SampleBatch wrong;
    wrong.samples = Matrix(2, 3);
    CHECK_THROWS_AS(s->render(wrong), RendererError);
  }
  SUBCASE("bad endpoints") {
    CHECK_THROWS_AS(ExternalSession::open("tcp:localhost", schema), ConfigError);
    CHECK_THROWS_AS(ExternalSession::open("tcp:localhost:0", schema), ConfigError);
    CHECK_THROWS_AS(ExternalSession::open("command:  ", schema), ConfigError);
  }
}

TEST_CASE("in-thread peer over a socket pair") {
  const auto cfg = load_oracle_config(kOracleConfig);
  auto [client_end, peer_end] = channel_pair();
  OracleRenderer peer_renderer(cfg);
  PeerOptions opts;
  opts.seed = 5;
  std::size_t served = 0;
  std::thread peer([&, ch = std::move(peer_end)] { served = serve_oracle(*ch, peer_renderer, opts); });
  {
    auto session = ExternalSession::over(std::move(client_end), cfg.schema);
    ExternalRenderer renderer(std::move(session));
    const auto batch = some_batch(30, 8);
    CHECK(renderer.render(batch, 0) == oracle_render(cfg, batch, peer_noise_seed(5, 1)));
    CHECK(renderer.feature_dim() == 8);
  }
  peer.join();
  CHECK(served == 1);
}

TEST_CASE("peer answers malformed traffic and keeps serving") {
  const auto cfg = load_oracle_config(kOracleConfig);
  auto [client, peer_end] = channel_pair();
  OracleRenderer renderer(cfg);
  std::thread peer([&, ch = std::move(peer_end)] { serve_oracle(*ch, renderer, PeerOptions{}); });
  const auto next = [&] { return protocol::decode(*client->read_line(5s)); };
  CHECK(std::holds_alternative<protocol::Hello>(next()));

  client->write_line("{oops");
  auto reply = next();
  REQUIRE(std::holds_alternative<protocol::ErrorReply>(reply));
  CHECK(std::get<protocol::ErrorReply>(reply).id == 0);
  CHECK(std::get<protocol::ErrorReply>(reply).message.find("malformed message") != std::string::npos);

  client->write_line(protocol::encode(protocol::RenderRequest{7, Matrix(2, 3)}));
  CHECK(std::get<protocol::ErrorReply>(next()).message == "expected N=5 attributes");
  client->write_line(protocol::encode(protocol::RenderRequest{7, Matrix(2, 5)}));
  CHECK(std::get<protocol::ErrorReply>(next()).message.find("non-increasing") != std::string::npos);
  client->write_line(protocol::encode(protocol::RenderRequest{8, Matrix(0, 0)}));
  CHECK(std::get<protocol::ErrorReply>(next()).message == "empty batch");
  Matrix out_of_domain(1, 5);
  out_of_domain(0, 1) = 1000;
  client->write_line(protocol::encode(protocol::RenderRequest{9, out_of_domain}));
  CHECK(std::get<protocol::ErrorReply>(next()).message.find("schema mismatch") != std::string::npos);
  client->write_line(protocol::encode(protocol::Hello{}));
  CHECK(std::get<protocol::ErrorReply>(next()).message.find("unexpected message type") != std::string::npos);

  Matrix ok(1, 5);
  ok(0, 4) = 5;
  client->write_line(protocol::encode(protocol::RenderRequest{10, ok}));
  const auto features = std::get<protocol::Features>(next());
  CHECK(features.id == 10);
  CHECK(features.data.cols() == 8);

  client->write_line(protocol::encode(protocol::Shutdown{}));
  peer.join();
  CHECK_FALSE(client->read_line(1s).has_value());
}

TEST_CASE("tcp transport") {
  const auto cfg = load_oracle_config(kOracleConfig);
  TcpListener listener(0);
  REQUIRE(listener.port() != 0);
  OracleRenderer renderer(cfg);
  std::thread peer([&] {
    auto ch = listener.accept();
    PeerOptions opts;
    opts.seed = 3;
    serve_oracle(*ch, renderer, opts);
  });
  {
    auto session = ExternalSession::open("tcp:127.0.0.1:" + std::to_string(listener.port()), cfg.schema);
    const auto batch = some_batch(20, 2);
    CHECK(session->render(batch) == oracle_render(cfg, batch, peer_noise_seed(3, 1)));
  }
  peer.join();

  // nothing listening on a fresh ephemeral port once its listener is gone
  std::uint16_t dead_port;
  {
    TcpListener tmp(0);
    dead_port = tmp.port();
  }
  CHECK_THROWS_WITH_AS(tcp_connect("127.0.0.1", dead_port, 1s), doctest::Contains("cannot connect"), RendererError);
}
