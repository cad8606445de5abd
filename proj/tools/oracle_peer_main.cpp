// Reference renderer peer: serves the oracle renderer over the wire protocol
// on stdin/stdout, or on one TCP connection with --listen.

#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>

#include "attrdesc/error.hpp"
#include "attrdesc/oracle_peer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Oracle renderer protocol peer", "attrdesc-oracle-peer"};
  std::string config_path;
  attrdesc::PeerOptions options;
  std::optional<int> listen_port;
  std::string fault = "none";
  app.add_option("-c,--config", config_path, "Oracle configuration file")->required();
  app.add_option("--seed", options.seed, "Noise seed; request k uses derive_seed(seed, {k})");
  app.add_option("--max-batch", options.max_batch, "Largest batch accepted");
  app.add_option("--listen", listen_port, "Serve one TCP connection on this port (0 = ephemeral) instead of stdio");
  app.add_option("--fault", fault, "Misbehave for client testing: none, desync, error, bad-version, garbage, silent, short");
  app.add_option("--fault-message", options.fault_message, "Message used by --fault error");
  CLI11_PARSE(app, argc, argv);

  const std::map<std::string, attrdesc::PeerFault> faults{
      {"none", attrdesc::PeerFault::none},           {"desync", attrdesc::PeerFault::desync},
      {"error", attrdesc::PeerFault::always_error},  {"bad-version", attrdesc::PeerFault::bad_version},
      {"garbage", attrdesc::PeerFault::garbage},     {"silent", attrdesc::PeerFault::silent},
      {"short", attrdesc::PeerFault::short_rows}};
  const auto it = faults.find(fault);
  if (it == faults.end()) {
    std::cerr << "unknown fault '" << fault << "'\n";
    return 2;
  }
  options.fault = it->second;

  try {
    attrdesc::OracleRenderer renderer(attrdesc::load_oracle_config(config_path));
    if (listen_port) {
      attrdesc::TcpListener listener(static_cast<std::uint16_t>(*listen_port));
      std::cerr << "listening on 127.0.0.1:" << listener.port() << std::endl;
      auto channel = listener.accept();
      attrdesc::serve_oracle(*channel, renderer, options);
    } else {
      attrdesc::FdChannel channel(::dup(STDIN_FILENO), ::dup(STDOUT_FILENO));
      attrdesc::serve_oracle(channel, renderer, options);
    }
  } catch (const attrdesc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
