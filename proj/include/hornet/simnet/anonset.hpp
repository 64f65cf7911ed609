#pragma once

// Which sources could have sent a packet that an adversary at one node sees
// arriving from a given neighbour, assuming paths are valley-free: zero or
// more customer-to-provider links, at most one peer link, then zero or more
// provider-to-customer links. Paths are simple and may end at the adversary.

#include <optional>

#include "hornet/simnet/topology.hpp"

namespace hornet::simnet {

struct AnonymitySet {
  std::uint64_t weight = 0;
  std::vector<std::string> members;  // sorted by name

  bool operator==(const AnonymitySet&) const = default;
};

// `known_distance` counts links between the source and the adversary; with
// it set, a source qualifies if any valley-free path of exactly that length
// exists. Throws kInvalidArgument if ingress is not adjacent to adversary.
AnonymitySet anonymity_set(const Topology& topo, const std::string& adversary,
                           const std::string& ingress,
                           std::optional<unsigned> known_distance = std::nullopt);

// Same answer by enumerating every simple path into the adversary and
// testing each one; exponential, for cross-checking small topologies.
AnonymitySet anonymity_set_brute_force(const Topology& topo, const std::string& adversary,
                                       const std::string& ingress,
                                       std::optional<unsigned> known_distance = std::nullopt);

bool is_valley_free(const Topology& topo, const std::vector<std::string>& path);

}  // namespace hornet::simnet
