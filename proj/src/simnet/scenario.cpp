#include "hornet/simnet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "hornet/protocol.hpp"

namespace hornet::simnet {

namespace {

using nlohmann::json;

std::string sub(const std::string& where, const std::string& key) { return where + "." + key; }
std::string idx(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(sub(where, key), "missing");
  return j.at(key);
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) throw ValidationError(sub(where, key), "expected a string");
  return v.get<std::string>();
}

template <typename T>
T get_uint(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  const bool non_negative =
      v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!non_negative || v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    throw ValidationError(sub(where, key), "expected a non-negative integer");
  }
  return v.get<T>();
}

std::vector<std::string> get_names(const json& j, const char* key, const std::string& where,
                                   bool required) {
  if (!j.contains(key)) {
    if (required) throw ValidationError(sub(where, key), "missing");
    return {};
  }
  const json& v = j.at(key);
  if (!v.is_array()) throw ValidationError(sub(where, key), "expected an array of node names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ValidationError(idx(sub(where, key), i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
}

RendezvousSide parse_side(const json& j, const std::string& where) {
  require_object(j, where);
  RendezvousSide s;
  s.host = get_string(j, "host", where);
  s.forward = get_names(j, "forward", where, true);
  s.backward = get_names(j, "backward", where, false);
  return s;
}

InterceptorSpec parse_interceptor(const json& j, const std::string& where) {
  require_object(j, where);
  InterceptorSpec spec;
  if (j.contains("at_node")) spec.at_node = get_string(j, "at_node", where);
  if (j.contains("at_link")) {
    const auto link = get_names(j, "at_link", where, true);
    if (link.size() != 2) throw ValidationError(sub(where, "at_link"), "expected [from, to]");
    spec.at_link = std::make_pair(link[0], link[1]);
  }
  if (spec.at_node.has_value() == spec.at_link.has_value()) {
    throw ValidationError(where, "exactly one of at_node and at_link is required");
  }
  const std::string action = get_string(j, "action", where);
  static const std::pair<const char*, Action> kActions[] = {
      {"record", Action::kRecord}, {"flip_bit", Action::kFlipBit}, {"replay", Action::kReplay},
      {"delay", Action::kDelay},   {"drop", Action::kDrop}};
  auto it = std::find_if(std::begin(kActions), std::end(kActions),
                         [&](const auto& a) { return action == a.first; });
  if (it == std::end(kActions)) {
    throw ValidationError(sub(where, "action"), "unknown action '" + action + "'");
  }
  spec.action = it->second;
  if (j.contains("packet")) {
    const std::string p = get_string(j, "packet", where);
    if (p == "any") {
      spec.packet = PacketFilter::kAny;
    } else if (p == "setup") {
      spec.packet = PacketFilter::kSetup;
    } else if (p == "data") {
      spec.packet = PacketFilter::kData;
    } else {
      throw ValidationError(sub(where, "packet"), "expected setup, data or any");
    }
  }
  if (j.contains("match")) spec.match = get_uint<std::uint64_t>(j, "match", where, 0);
  if (j.contains("position")) spec.position = get_uint<std::uint64_t>(j, "position", where, 0);
  spec.copies = get_uint<std::uint32_t>(j, "copies", where, 1);
  spec.ticks = get_uint<std::uint64_t>(j, "ticks", where, 1);
  return spec;
}

void check_walk(const Topology& topo, const std::vector<std::string>& walk,
                const std::string& where) {
  for (std::size_t i = 0; i < walk.size(); ++i) {
    if (!topo.has_node(walk[i])) throw ValidationError(where, "unknown node " + walk[i]);
  }
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
    if (!topo.adjacent(walk[i], walk[i + 1])) {
      throw ValidationError(where, walk[i] + " and " + walk[i + 1] + " are not linked");
    }
  }
}

void check_path(const Topology& topo, const std::string& source,
                const std::vector<std::string>& forward, const std::vector<std::string>& backward,
                const std::string& where) {
  if (forward.empty()) throw ValidationError(sub(where, "forward"), "empty path");
  if (forward.size() > kMaxHops) {
    throw ValidationError(sub(where, "forward"), "longer than " + std::to_string(kMaxHops));
  }
  if (backward.empty()) throw ValidationError(sub(where, "backward"), "empty path");
  if (backward.size() > kMaxHops) {
    throw ValidationError(sub(where, "backward"), "longer than " + std::to_string(kMaxHops));
  }
  std::vector<std::string> out{source};
  out.insert(out.end(), forward.begin(), forward.end());
  check_walk(topo, out, sub(where, "forward"));
  std::vector<std::string> back{forward.back()};
  back.insert(back.end(), backward.begin(), backward.end());
  back.push_back(source);
  check_walk(topo, back, sub(where, "backward"));
  if (std::find(forward.begin(), forward.end(), source) != forward.end()) {
    throw ValidationError(sub(where, "forward"), "path revisits the source");
  }
}

void check_lifetime(std::uint32_t lifetime, const std::string& where) {
  if (std::find(std::begin(kAllowedLifetimes), std::end(kAllowedLifetimes), lifetime) ==
      std::end(kAllowedLifetimes)) {
    throw ValidationError(sub(where, "lifetime"), "must be 1, 3, 6 or 60 decaseconds");
  }
}

void check_payload(std::size_t payload, std::size_t min, const std::string& where) {
  if (payload % 16 != 0 || payload < min || payload > kMaxPayloadSize) {
    throw ValidationError(sub(where, "payload_size"),
                          "must be a multiple of 16 in [" + std::to_string(min) + ", " +
                              std::to_string(kMaxPayloadSize) + "]");
  }
}

// Largest application message a payload can carry; matches seal_block.
std::size_t capacity(std::size_t payload) { return payload - 26; }

}  // namespace

const char* action_name(Action action) {
  switch (action) {
    case Action::kRecord: return "record";
    case Action::kFlipBit: return "flip_bit";
    case Action::kReplay: return "replay";
    case Action::kDelay: return "delay";
    case Action::kDrop: return "drop";
  }
  return "?";
}

Scenario Scenario::from_json(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "scenario");
  Scenario sc;
  sc.seed = get_uint<std::uint64_t>(j, "seed", "scenario", 1);
  sc.start_time = get_uint<std::uint32_t>(j, "start_time", "scenario", 100000);
  if (j.contains("topology")) {
    sc.topology = Topology::from_json(j.at("topology"), "scenario.topology");
  } else if (j.contains("topology_file")) {
    const auto path = base_dir / get_string(j, "topology_file", "scenario");
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario.topology_file", "cannot open " + path.string());
    json t;
    try {
      t = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("scenario.topology_file", e.what());
    }
    sc.topology = Topology::from_json(t, path.filename().string());
  } else {
    throw ValidationError("scenario", "needs topology or topology_file");
  }

  if (j.contains("sessions")) {
    const json& list = j.at("sessions");
    if (!list.is_array()) throw ValidationError("scenario.sessions", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = idx("scenario.sessions", i);
      require_object(list[i], at);
      SessionSpec s;
      s.name = list[i].contains("name") ? get_string(list[i], "name", at) : "session" + std::to_string(i);
      s.source = get_string(list[i], "source", at);
      s.forward = get_names(list[i], "forward", at, true);
      s.backward = get_names(list[i], "backward", at, false);
      s.lifetime = get_uint<std::uint32_t>(list[i], "lifetime", at, 60);
      s.payload_size = get_uint<std::size_t>(list[i], "payload_size", at, kDefaultPayloadSize);
      if (list[i].contains("traffic")) {
        const json& t = list[i].at("traffic");
        const std::string tat = sub(at, "traffic");
        require_object(t, tat);
        s.traffic.messages = get_uint<std::size_t>(t, "messages", tat, 10);
        s.traffic.size = get_uint<std::size_t>(t, "size", tat, 64);
        if (t.contains("echo")) {
          if (!t.at("echo").is_boolean()) throw ValidationError(sub(tat, "echo"), "expected a boolean");
          s.traffic.echo = t.at("echo").get<bool>();
        }
      }
      sc.sessions.push_back(std::move(s));
    }
  }

  if (j.contains("rendezvous")) {
    const json& list = j.at("rendezvous");
    if (!list.is_array()) throw ValidationError("scenario.rendezvous", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = idx("scenario.rendezvous", i);
      require_object(list[i], at);
      RendezvousSpec r;
      r.name = list[i].contains("name") ? get_string(list[i], "name", at) : "rendezvous" + std::to_string(i);
      if (list[i].contains("label")) r.label = get_string(list[i], "label", at);
      r.service = parse_side(need(list[i], "service", at), sub(at, "service"));
      r.client = parse_side(need(list[i], "client", at), sub(at, "client"));
      r.lifetime = get_uint<std::uint32_t>(list[i], "lifetime", at, 60);
      r.payload_size = get_uint<std::size_t>(list[i], "payload_size", at, kDefaultPayloadSize);
      r.messages = get_uint<std::size_t>(list[i], "messages", at, 5);
      r.size = get_uint<std::size_t>(list[i], "size", at, 64);
      sc.rendezvous.push_back(std::move(r));
    }
  }

  if (j.contains("adversary")) {
    const json& list = j.at("adversary");
    if (!list.is_array()) throw ValidationError("scenario.adversary", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      sc.adversary.push_back(parse_interceptor(list[i], idx("scenario.adversary", i)));
    }
  }
  sc.validate();
  return sc;
}

Scenario Scenario::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError(file.string(), "cannot open scenario file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(file.string(), e.what());
  }
  return from_json(j, file.parent_path());
}

void Scenario::validate() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const SessionSpec& s = sessions[i];
    const std::string at = idx("scenario.sessions", i);
    check_path(topology, s.source, s.forward, s.backward, at);
    check_lifetime(s.lifetime, at);
    // Control blocks carry a full header, so the payload must hold one.
    check_payload(s.payload_size, 368, at);
    if (s.traffic.size > capacity(s.payload_size)) {
      throw ValidationError(sub(sub(at, "traffic"), "size"), "does not fit the payload");
    }
    names.push_back(s.name);
  }
  for (std::size_t i = 0; i < rendezvous.size(); ++i) {
    const RendezvousSpec& r = rendezvous[i];
    const std::string at = idx("scenario.rendezvous", i);
    check_path(topology, r.service.host, r.service.forward, r.service.backward,
               sub(at, "service"));
    check_path(topology, r.client.host, r.client.forward, r.client.backward, sub(at, "client"));
    if (r.client.forward.back() != r.rp()) {
      throw ValidationError(sub(at, "client.forward"), "must end at the service's rendezvous point");
    }
    for (const auto* side : {&r.service, &r.client}) {
      if (side->backward.size() + 1 > kMaxHops) {
        throw ValidationError(at, "backward paths must leave room for the rendezvous hop");
      }
    }
    check_lifetime(r.lifetime, at);
    check_payload(r.payload_size, kRendezvousMinPayload, at);
    if (r.size + 32 > capacity(r.payload_size)) {
      throw ValidationError(sub(at, "size"), "does not fit the payload");
    }
    names.push_back(r.name);
  }
  std::sort(names.begin(), names.end());
  auto dup = std::adjacent_find(names.begin(), names.end());
  if (dup != names.end()) throw ValidationError("scenario", "duplicate session name " + *dup);
  for (std::size_t i = 0; i < adversary.size(); ++i) {
    const InterceptorSpec& a = adversary[i];
    const std::string at = idx("scenario.adversary", i);
    if (a.at_node && !topology.has_node(*a.at_node)) {
      throw ValidationError(sub(at, "at_node"), "unknown node " + *a.at_node);
    }
    if (a.at_link && !topology.adjacent(a.at_link->first, a.at_link->second)) {
      throw ValidationError(sub(at, "at_link"), "no such link");
    }
    if (a.action == Action::kReplay && a.copies == 0) {
      throw ValidationError(sub(at, "copies"), "must be at least 1");
    }
  }
}

}  // namespace hornet::simnet
