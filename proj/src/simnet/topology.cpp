#include "hornet/simnet/topology.hpp"

namespace hornet::simnet {

namespace {

std::string field(const std::string& where, const std::string& name) {
  return where + "." + name;
}

std::string item(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(field(where, key), "missing");
  return j.at(key);
}

std::string require_string(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) throw ValidationError(field(where, key), "expected a string");
  return v.get<std::string>();
}

}  // namespace

Topology Topology::from_json(const nlohmann::json& j, const std::string& where) {
  Topology t;
  const auto& nodes = require(j, "nodes", where);
  if (!nodes.is_array()) throw ValidationError(field(where, "nodes"), "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = item(field(where, "nodes"), i);
    const std::string name = require_string(nodes[i], "name", at);
    std::uint64_t weight = 1;
    if (nodes[i].contains("weight")) {
      const nlohmann::json& w = nodes[i]["weight"];
      if (!w.is_number_unsigned() && !(w.is_number_integer() && w.get<std::int64_t>() >= 0)) {
        throw ValidationError(field(at, "weight"), "expected a non-negative integer");
      }
      weight = nodes[i]["weight"].get<std::uint64_t>();
    }
    if (t.has_node(name)) throw ValidationError(field(at, "name"), "duplicate node " + name);
    t.add_node(name, weight);
  }
  if (j.contains("links")) {
    const auto& links = j["links"];
    if (!links.is_array()) throw ValidationError(field(where, "links"), "expected an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string at = item(field(where, "links"), i);
      Link link;
      link.a = require_string(links[i], "a", at);
      link.b = require_string(links[i], "b", at);
      const std::string type = require_string(links[i], "type", at);
      if (type == "customer-provider") {
        link.rel = Relationship::kCustomerProvider;
      } else if (type == "peer") {
        link.rel = Relationship::kPeer;
      } else {
        throw ValidationError(field(at, "type"), "unknown relationship '" + type + "'");
      }
      for (const auto* end : {&link.a, &link.b}) {
        if (!t.has_node(*end)) throw ValidationError(at, "unknown node " + *end);
      }
      if (link.a == link.b) throw ValidationError(at, "self loop at " + link.a);
      if (t.adjacent(link.a, link.b)) {
        throw ValidationError(at, "duplicate link " + link.a + "-" + link.b);
      }
      t.add_link(link);
    }
  }
  return t;
}

nlohmann::json Topology::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : names_) nodes.push_back({{"name", n}, {"weight", weights_.at(n)}});
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : links_) {
    links.push_back({{"a", l.a},
                     {"b", l.b},
                     {"type", l.rel == Relationship::kPeer ? "peer" : "customer-provider"}});
  }
  return {{"nodes", nodes}, {"links", links}};
}

void Topology::add_node(const std::string& name, std::uint64_t weight) {
  if (has_node(name)) throw ValidationError(name, "duplicate node");
  names_.push_back(name);
  index_[name] = static_cast<std::uint32_t>(names_.size());
  weights_[name] = weight;
  neighbors_[name];
}

void Topology::add_link(const Link& link) {
  if (!has_node(link.a) || !has_node(link.b)) {
    throw ValidationError(link.a + "-" + link.b, "link references an unknown node");
  }
  links_.push_back(link);
  if (link.rel == Relationship::kPeer) {
    adjacency_[{link.a, link.b}] = Direction::kPeer;
    adjacency_[{link.b, link.a}] = Direction::kPeer;
  } else {
    adjacency_[{link.a, link.b}] = Direction::kUp;
    adjacency_[{link.b, link.a}] = Direction::kDown;
  }
  neighbors_[link.a].push_back(link.b);
  neighbors_[link.b].push_back(link.a);
}

std::uint32_t Topology::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError(name, "unknown node");
  return it->second;
}

const std::string& Topology::name_of(std::uint32_t id) const {
  if (id == 0 || id > names_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "no node with id " + std::to_string(id));
  }
  return names_[id - 1];
}

std::uint64_t Topology::weight(const std::string& name) const {
  auto it = weights_.find(name);
  if (it == weights_.end()) throw ValidationError(name, "unknown node");
  return it->second;
}

std::vector<std::string> Topology::neighbors(const std::string& name) const {
  auto it = neighbors_.find(name);
  if (it == neighbors_.end()) throw ValidationError(name, "unknown node");
  return it->second;
}

std::optional<Direction> Topology::direction(const std::string& from,
                                             const std::string& to) const {
  auto it = adjacency_.find({from, to});
  if (it == adjacency_.end()) return std::nullopt;
  return it->second;
}

}  // namespace hornet::simnet
