#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hornet/error.hpp"

namespace hornet::simnet {

// Raised for malformed scenario or topology input. `path` locates the
// offending field, e.g. "sessions[1].forward[2]".
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(ErrorCode::kValidation, path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Relationship { kCustomerProvider, kPeer };

// For kCustomerProvider, `a` is the customer and `b` its provider.
struct Link {
  std::string a;
  std::string b;
  Relationship rel = Relationship::kPeer;
};

// How a packet moving from one node to an adjacent one travels.
enum class Direction { kUp, kPeer, kDown };

class Topology {
 public:
  // JSON form:
  //   {"nodes": [{"name": "AS0", "weight": 10}, ...],
  //    "links": [{"a": "AS1", "b": "AS0", "type": "customer-provider"},
  //              {"a": "AS5", "b": "AS6", "type": "peer"}]}
  // "weight" defaults to 1.
  static Topology from_json(const nlohmann::json& j, const std::string& where = "topology");
  nlohmann::json to_json() const;

  void add_node(const std::string& name, std::uint64_t weight = 1);
  void add_link(const Link& link);

  const std::vector<std::string>& nodes() const { return names_; }
  const std::vector<Link>& links() const { return links_; }
  bool has_node(const std::string& name) const { return index_.count(name) != 0; }
  // 1-based node id used on the wire; 0 is never assigned.
  std::uint32_t id_of(const std::string& name) const;
  const std::string& name_of(std::uint32_t id) const;
  std::uint64_t weight(const std::string& name) const;
  std::vector<std::string> neighbors(const std::string& name) const;
  std::optional<Direction> direction(const std::string& from, const std::string& to) const;
  bool adjacent(const std::string& a, const std::string& b) const {
    return direction(a, b).has_value();
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::uint32_t> index_;
  std::map<std::string, std::uint64_t> weights_;
  std::vector<Link> links_;
  std::map<std::pair<std::string, std::string>, Direction> adjacency_;
  std::map<std::string, std::vector<std::string>> neighbors_;
};

}  // namespace hornet::simnet
