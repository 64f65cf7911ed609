#pragma once

// Scenario files (JSON). Top level:
//
//   seed          integer, default 1
//   start_time    decaseconds since the epoch at tick 0, default 100000
//   topology      inline topology object, or
//   topology_file path relative to the scenario file
//   sessions      list of {name, source, forward: [..., destination],
//                 backward: [...], lifetime, payload_size,
//                 traffic: {messages, size, echo}}
//   rendezvous    list of {name, label, lifetime, payload_size, messages, size,
//                 service: {host, forward: [..., rp], backward: [...]},
//                 client:  {host, forward: [..., rp], backward: [...]}}
//   adversary     list of {at_node | at_link: [from, to], action, packet,
//                 match, position, copies, ticks}
//
// `backward` lists the nodes strictly between the destination and the source.
// Interceptor actions are record, flip_bit, replay, delay and drop; `packet`
// is "setup", "data" or "any"; `match` picks the n-th (0-based) matching
// packet, all of them when absent.

#include <filesystem>

#include "hornet/simnet/topology.hpp"

namespace hornet::simnet {

struct TrafficSpec {
  std::size_t messages = 10;
  std::size_t size = 64;
  bool echo = true;
};

struct SessionSpec {
  std::string name;
  std::string source;
  std::vector<std::string> forward;
  std::vector<std::string> backward;
  std::uint32_t lifetime = 60;
  std::size_t payload_size = 512;
  TrafficSpec traffic;

  const std::string& destination() const { return forward.back(); }
};

struct RendezvousSide {
  std::string host;
  std::vector<std::string> forward;  // ends at the rendezvous point
  std::vector<std::string> backward;
};

struct RendezvousSpec {
  std::string name;
  std::string label = "service";
  RendezvousSide service;
  RendezvousSide client;
  std::uint32_t lifetime = 60;
  std::size_t payload_size = 512;
  std::size_t messages = 5;
  std::size_t size = 64;

  const std::string& rp() const { return service.forward.back(); }
};

enum class Action { kRecord, kFlipBit, kReplay, kDelay, kDrop };
enum class PacketFilter { kAny, kSetup, kData };

struct InterceptorSpec {
  std::optional<std::string> at_node;
  std::optional<std::pair<std::string, std::string>> at_link;
  Action action = Action::kRecord;
  PacketFilter packet = PacketFilter::kAny;
  std::optional<std::uint64_t> match;
  std::optional<std::uint64_t> position;  // bit index; random when absent
  std::uint32_t copies = 1;
  std::uint64_t ticks = 1;
};

struct Scenario {
  std::uint64_t seed = 1;
  std::uint32_t start_time = 100000;
  Topology topology;
  std::vector<SessionSpec> sessions;
  std::vector<RendezvousSpec> rendezvous;
  std::vector<InterceptorSpec> adversary;

  // Parses and validates. Throws ValidationError.
  static Scenario from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = ".");
  static Scenario load(const std::filesystem::path& file);

  // Paths are walks in the topology, lengths are at most r, lifetimes and
  // payload sizes are usable. Throws ValidationError.
  void validate() const;
};

const char* action_name(Action action);

}  // namespace hornet::simnet
