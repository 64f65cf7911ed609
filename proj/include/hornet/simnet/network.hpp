#pragma once

// Deterministic single-threaded event loop. Every link delivers after one
// tick (1 ms of simulated time) plus any interceptor delay; events at the
// same tick run in the order they were scheduled.

#include <iosfwd>

#include "hornet/bytes.hpp"
#include "hornet/simnet/scenario.hpp"

namespace hornet::simnet {

inline constexpr std::uint64_t kTicksPerDecasecond = 10000;

struct SessionResult {
  std::string name;
  bool rendezvous = false;
  bool established = false;
  std::size_t messages = 0;
  std::size_t forward_delivered = 0;
  std::size_t forward_correct = 0;
  std::size_t backward_delivered = 0;
  std::size_t backward_correct = 0;
  bool echo = true;

  bool complete() const;
};

struct Observation {
  std::uint64_t tick = 0;
  std::string from;
  std::string kind;  // setup, data, nested or garbled
  std::size_t size = 0;
  std::string digest;
};

struct Drop {
  std::uint64_t tick = 0;
  std::string node;
  std::string from;
  std::string error;
};

struct Recording {
  std::uint64_t tick = 0;
  std::string from;
  std::string to;
  Bytes bytes;
};

struct InvariantResult {
  std::string name;
  std::size_t violations = 0;
  std::vector<std::string> details;
};

struct TranscriptReport {
  std::uint64_t seed = 0;
  std::uint64_t final_tick = 0;
  std::size_t packets_sent = 0;
  std::vector<SessionResult> sessions;
  std::vector<Drop> drops;
  std::vector<std::uint64_t> interceptor_hits;
  std::map<std::string, std::vector<Observation>> observed;  // by receiving node
  std::map<std::string, std::size_t> session_entries;        // endpoint state per node
  std::vector<std::string> endpoints;
  std::vector<Recording> recordings;
  std::vector<InvariantResult> invariants;
  // Window matches between packets on different links, split by where the
  // window starts.
  std::size_t header_collisions = 0;
  std::size_t payload_collisions = 0;
  std::size_t dh_calls_in_transit = 0;

  std::size_t violations() const;
  bool all_delivered() const;
  nlohmann::json to_json() const;
  // Hex dumps of every packet captured by a record interceptor.
  void write_hexdump(std::ostream& out) const;
};

TranscriptReport run_scenario(const Scenario& scenario);

}  // namespace hornet::simnet
