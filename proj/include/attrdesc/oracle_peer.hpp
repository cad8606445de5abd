#pragma once

// Reference protocol peer backed by the oracle renderer. Noise for request k is
// seeded with derive_seed(seed, {k}), so a client can reproduce any response
// in-process with oracle_render.

#include <cstdint>
#include <string>

#include "attrdesc/oracle.hpp"
#include "attrdesc/transport.hpp"

namespace attrdesc {

enum class PeerFault {
  none,
  desync,       // reply with id + 1
  always_error, // reply error{fault_message} to every render
  bad_version,  // announce version 2
  garbage,      // reply with a non-JSON line
  silent,       // never reply to render
  short_rows,   // drop the last feature row
};

struct PeerOptions {
  std::uint64_t seed = 0;
  std::size_t max_batch = 100000;
  PeerFault fault = PeerFault::none;
  std::string fault_message = "asset missing";
};

/// Serves until shutdown or end of input. Malformed lines get an error reply and
/// the loop continues. Returns the number of render requests answered with features.
std::size_t serve_oracle(LineChannel& channel, OracleRenderer& renderer, const PeerOptions& options);

std::uint64_t peer_noise_seed(std::uint64_t seed, std::uint64_t request_id);

}  // namespace attrdesc
