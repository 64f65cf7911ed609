#include "hornet/simnet/anonset.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hornet::simnet {

namespace {

void check_adjacent(const Topology& topo, const std::string& adversary,
                    const std::string& ingress) {
  if (!topo.has_node(adversary) || !topo.has_node(ingress)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown adversary or ingress node");
  }
  if (!topo.adjacent(ingress, adversary)) {
    throw Error(ErrorCode::kInvalidArgument, ingress + " is not adjacent to " + adversary);
  }
}

AnonymitySet collect(const Topology& topo, const std::map<std::string, std::set<unsigned>>& seen,
                     std::optional<unsigned> known_distance) {
  AnonymitySet out;
  for (const auto& [name, distances] : seen) {
    if (known_distance && distances.count(*known_distance) == 0) continue;
    out.members.push_back(name);
    out.weight += topo.weight(name);
  }
  return out;
}

}  // namespace

bool is_valley_free(const Topology& topo, const std::vector<std::string>& path) {
  bool descending = false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto dir = topo.direction(path[i], path[i + 1]);
    if (!dir) return false;
    if (*dir == Direction::kUp) {
      if (descending) return false;
    } else if (*dir == Direction::kPeer) {
      if (descending) return false;
      descending = true;
    } else {
      descending = true;
    }
  }
  return true;
}

AnonymitySet anonymity_set(const Topology& topo, const std::string& adversary,
                           const std::string& ingress, std::optional<unsigned> known_distance) {
  check_adjacent(topo, adversary, ingress);

  // Walk backwards from the adversary. `up_only` means every earlier link
  // must be customer-to-provider.
  std::map<std::string, std::set<unsigned>> seen;
  std::set<std::string> on_path{adversary};
  std::function<void(const std::string&, bool, unsigned)> extend =
      [&](const std::string& node, bool up_only, unsigned distance) {
        seen[node].insert(distance);
        on_path.insert(node);
        for (const auto& prev : topo.neighbors(node)) {
          if (on_path.count(prev)) continue;
          const Direction dir = *topo.direction(prev, node);
          if (up_only && dir != Direction::kUp) continue;
          extend(prev, up_only || dir != Direction::kDown, distance + 1);
        }
        on_path.erase(node);
      };
  const Direction last = *topo.direction(ingress, adversary);
  extend(ingress, last != Direction::kDown, 1);
  return collect(topo, seen, known_distance);
}

AnonymitySet anonymity_set_brute_force(const Topology& topo, const std::string& adversary,
                                       const std::string& ingress,
                                       std::optional<unsigned> known_distance) {
  check_adjacent(topo, adversary, ingress);
  std::map<std::string, std::set<unsigned>> seen;
  // Every simple path ending in ingress -> adversary, grown at the front.
  std::vector<std::string> path{ingress, adversary};
  std::function<void()> grow = [&]() {
    if (is_valley_free(topo, path)) {
      seen[path.front()].insert(static_cast<unsigned>(path.size() - 1));
    }
    for (const auto& prev : topo.neighbors(path.front())) {
      if (std::find(path.begin(), path.end(), prev) != path.end()) continue;
      path.insert(path.begin(), prev);
      grow();
      path.erase(path.begin());
    }
  };
  grow();
  return collect(topo, seen, known_distance);
}

}  // namespace hornet::simnet
