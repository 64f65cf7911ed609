#include "hornet/simnet/network.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <queue>
#include <set>
#include <string_view>
#include <unordered_set>

#include "hornet/protocol.hpp"

namespace hornet::simnet {

bool SessionResult::complete() const {
  if (!established || forward_correct != messages) return false;
  return !echo || backward_correct == messages;
}

std::size_t TranscriptReport::violations() const {
  std::size_t n = 0;
  for (const auto& inv : invariants) n += inv.violations;
  return n;
}

bool TranscriptReport::all_delivered() const {
  return std::all_of(sessions.begin(), sessions.end(),
                     [](const SessionResult& s) { return s.complete(); });
}

namespace {

constexpr std::uint64_t kMaxEvents = 50'000'000;

struct Event {
  std::uint64_t tick = 0;
  std::uint64_t seq = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  Bytes bytes;
  std::size_t flow = 0;
  bool tampered = false;

  bool operator>(const Event& o) const {
    return tick != o.tick ? tick > o.tick : seq > o.seq;
  }
};

// Simulator-side accounting for one session or rendezvous pair; nodes never
// see any of this.
struct Flow {
  SessionResult result;
  std::size_t payload_size = 0;
  std::multiset<Bytes> awaiting_forward;
  std::multiset<Bytes> awaiting_backward;
};

enum class Role { kPlain, kService, kClient };

struct Agent {
  Role role = Role::kPlain;
  std::size_t flow = 0;
  std::uint32_t node = 0;
  PendingSetup pending;
  bool active = false;
  std::size_t rendezvous = 0;  // index into the scenario's rendezvous list
  std::optional<RendezvousService> service;
  std::optional<RendezvousClient> client;

  SessionState& session() {
    if (service) return service->session();
    if (client) return client->session();
    return pending.session;
  }
};

struct WireCopy {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::size_t flow = 0;
  std::size_t header_end = 0;
  bool tampered = false;
  Bytes bytes;
};

std::string kind_of(ByteSpan bytes, std::size_t* header_end) {
  try {
    const CommonHeader chdr = CommonHeader::parse(bytes);
    if (chdr.is_setup()) {
      *header_end = kChdrSize + kSphinxHeaderSize;
      return "setup";
    }
    *header_end = chdr.nested ? kNestedDataHeaderSize : kDataHeaderSize;
    return chdr.nested ? "nested" : "data";
  } catch (const Error&) {
    *header_end = bytes.size();
    return "garbled";
  }
}

std::uint64_t window_hash(const std::uint8_t* p) {
  std::uint64_t a;
  std::uint64_t b;
  std::memcpy(&a, p, 8);
  std::memcpy(&b, p + 8, 8);
  std::uint64_t h = a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL) * 0xC2B2AE3D27D4EB4FULL;
  h ^= h >> 31;
  h *= 0xD6E8FEB86659FD93ULL;
  return h ^ (h >> 32);
}

class Simulator {
 public:
  explicit Simulator(const Scenario& sc)
      : sc_(sc), rng_(sc.seed), adversary_rng_(sc.seed ^ 0xA5A5A5A5A5A5A5A5ULL) {
    report_.seed = sc.seed;
    report_.interceptor_hits.assign(sc.adversary.size(), 0);
    seen_.assign(sc.adversary.size(), 0);
    const Topology& topo = sc.topology;
    for (const auto& name : topo.nodes()) {
      NodeState n = NodeState::generate(topo.id_of(name), rng_);
      for (const auto& nb : topo.neighbors(name)) n.neighbors.push_back(topo.id_of(nb));
      nodes_.push_back(std::move(n));
      report_.observed[name];
    }
    hosts_.resize(nodes_.size());
    echo_.assign(nodes_.size(), false);
    agents_at_.resize(nodes_.size());
  }

  TranscriptReport run() {
    start_sessions();
    std::uint64_t processed = 0;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      tick_ = ev.tick;
      handle(ev);
      if (++processed > kMaxEvents) {
        throw Error(ErrorCode::kInvalidArgument, "scenario did not settle");
      }
    }
    report_.final_tick = tick_;
    for (const Flow& f : flows_) report_.sessions.push_back(f.result);
    check_invariants();
    return std::move(report_);
  }

 private:
  ExpiryTime now() const {
    return ExpiryTime{static_cast<std::uint32_t>(sc_.start_time + tick_ / kTicksPerDecasecond)};
  }
  const std::string& name(std::uint32_t id) const { return sc_.topology.name_of(id); }
  NodeState& node(std::uint32_t id) { return nodes_[id - 1]; }

  std::vector<PathNode> path_nodes(const std::vector<std::string>& names) {
    std::vector<PathNode> out;
    for (const auto& n : names) {
      const std::uint32_t id = sc_.topology.id_of(n);
      out.push_back({id, node(id).dh_public, static_cast<std::uint16_t>(id & 0xffff)});
    }
    return out;
  }

  std::size_t add_agent(Role role, std::size_t flow, const std::string& source,
                        const std::vector<std::string>& forward,
                        const std::vector<std::string>& backward, std::uint32_t lifetime,
                        std::size_t payload_size, std::size_t rendezvous) {
    Agent a;
    a.role = role;
    a.flow = flow;
    a.node = sc_.topology.id_of(source);
    a.rendezvous = rendezvous;
    SessionRequest req;
    req.source_id = a.node;
    req.forward = path_nodes(forward);
    req.backward = path_nodes(backward);
    req.exp = ExpiryTime{now().decaseconds + lifetime};
    req.payload_size = payload_size;
    a.pending = source_begin_setup(req, now(), rng_);
    const std::uint32_t first = a.pending.outbound.next_hop;
    const Bytes wire = encode(a.pending.outbound.packet);
    agents_.push_back(std::move(a));
    const std::size_t index = agents_.size() - 1;
    agents_at_[agents_[index].node - 1].push_back(index);
    endpoints_.insert(source);
    send(agents_[index].node, first, wire, flow);
    return index;
  }

  void start_sessions() {
    for (const SessionSpec& s : sc_.sessions) {
      Flow f;
      f.result.name = s.name;
      f.result.messages = s.traffic.messages;
      f.result.echo = s.traffic.echo;
      f.payload_size = s.payload_size;
      flows_.push_back(std::move(f));
      const std::uint32_t dest = sc_.topology.id_of(s.destination());
      if (s.traffic.echo) echo_[dest - 1] = true;
      endpoints_.insert(s.destination());
      add_agent(Role::kPlain, flows_.size() - 1, s.source, s.forward, s.backward, s.lifetime,
                s.payload_size, 0);
    }
    for (std::size_t i = 0; i < sc_.rendezvous.size(); ++i) {
      const RendezvousSpec& r = sc_.rendezvous[i];
      Flow f;
      f.result.name = r.name;
      f.result.rendezvous = true;
      f.result.messages = r.messages;
      f.payload_size = r.payload_size;
      flows_.push_back(std::move(f));
      const std::size_t flow = flows_.size() - 1;
      const std::size_t svc = add_agent(Role::kService, flow, r.service.host, r.service.forward,
                                        r.service.backward, r.lifetime, r.payload_size, i);
      const std::size_t cli = add_agent(Role::kClient, flow, r.client.host, r.client.forward,
                                        r.client.backward, r.lifetime, r.payload_size, i);
      pairs_.push_back({svc, cli});
    }
  }

  bool filter_matches(PacketFilter filter, ByteSpan bytes) const {
    if (filter == PacketFilter::kAny) return true;
    std::size_t unused = 0;
    const std::string kind = kind_of(bytes, &unused);
    if (filter == PacketFilter::kSetup) return kind == "setup";
    return kind == "data" || kind == "nested";
  }

  void send(std::uint32_t from, std::uint32_t to, Bytes bytes, std::size_t flow) {
    ++report_.packets_sent;
    std::uint64_t delay = 0;
    std::uint32_t copies = 0;
    bool tampered = false;
    for (std::size_t i = 0; i < sc_.adversary.size(); ++i) {
      const InterceptorSpec& spec = sc_.adversary[i];
      const bool here = spec.at_node ? *spec.at_node == name(to)
                                     : spec.at_link->first == name(from) &&
                                           spec.at_link->second == name(to);
      if (!here || !filter_matches(spec.packet, bytes)) continue;
      const std::uint64_t nth = seen_[i]++;
      if (spec.match && *spec.match != nth) continue;
      ++report_.interceptor_hits[i];
      switch (spec.action) {
        case Action::kRecord:
          report_.recordings.push_back({tick_, name(from), name(to), bytes});
          break;
        case Action::kFlipBit: {
          const std::uint64_t bits = 8 * bytes.size();
          const std::uint64_t pos = spec.position ? *spec.position % bits
                                                  : adversary_rng_.uniform(bits);
          bytes[pos / 8] ^= static_cast<std::uint8_t>(0x80 >> (pos % 8));
          tampered = true;
          break;
        }
        case Action::kReplay:
          copies += spec.copies;
          break;
        case Action::kDelay:
          delay += spec.ticks;
          break;
        case Action::kDrop:
          report_.drops.push_back({tick_, name(to), name(from), "dropped by adversary"});
          return;
      }
    }
    for (std::uint32_t k = 0; k <= copies; ++k) {
      queue_.push(Event{tick_ + 1 + delay + k, next_seq_++, from, to, bytes, flow, tampered});
    }
  }

  void drop(const Event& ev, const std::string& why) {
    report_.drops.push_back({ev.tick, name(ev.to), name(ev.from), why});
  }

  void observe(const Event& ev) {
    std::size_t header_end = 0;
    Observation o;
    o.tick = ev.tick;
    o.from = name(ev.from);
    o.kind = kind_of(ev.bytes, &header_end);
    o.size = ev.bytes.size();
    const SymKey d = crypto::hash_to_key("hornet/simnet/digest", ev.bytes);
    o.digest = to_hex(ByteSpan(d.bytes.data(), 8));
    report_.observed[name(ev.to)].push_back(std::move(o));
    wire_.push_back({ev.from, ev.to, ev.flow, header_end, ev.tampered, ev.bytes});
  }

  void handle(const Event& ev) {
    observe(ev);
    Packet packet;
    try {
      packet = decode(ev.bytes);
    } catch (const Error& e) {
      drop(ev, e.what());
      return;
    }
    if (auto* setup = std::get_if<SetupPacket>(&packet)) {
      handle_setup(ev, *setup);
    } else {
      handle_data(ev, std::get<DataPacket>(packet));
    }
  }

  void handle_setup(const Event& ev, const SetupPacket& packet) {
    for (std::size_t index : agents_at_[ev.to - 1]) {
      Agent& a = agents_[index];
      if (a.active || !source_matches_setup(a.pending.session, packet)) continue;
      try {
        source_complete_setup(a.pending.session, packet, rng_);
      } catch (const Error& e) {
        drop(ev, e.what());
        return;
      }
      a.active = true;
      if (a.role == Role::kPlain) flows_[a.flow].result.established = true;
      established(index);
      return;
    }
    try {
      NodeState& n = node(ev.to);
      SetupStep step = node_process_setup(n, packet, now());
      if (step.at_destination) step = dest_turnaround(n, packet, now());
      send(ev.to, step.route.next_hop, encode(step.packet), ev.flow);
    } catch (const Error& e) {
      drop(ev, e.what());
    }
  }

  Bytes message(std::size_t size) { return rng_.bytes(size); }

  void established(std::size_t index) {
    Agent& a = agents_[index];
    Flow& flow = flows_[a.flow];
    if (a.role == Role::kPlain) {
      const SessionSpec& spec = sc_.sessions[a.flow];
      SessionState& s = a.pending.session;
      OutboundData control = source_control_packet(s, now(), rng_);
      send(a.node, control.next_hop, encode(control.packet), a.flow);
      for (std::size_t k = 0; k < spec.traffic.messages; ++k) {
        const Bytes m = message(spec.traffic.size);
        flow.awaiting_forward.insert(m);
        if (spec.traffic.echo) flow.awaiting_backward.insert(m);
        OutboundData out = source_send_data(s, m, now(), rng_);
        send(a.node, out.next_hop, encode(out.packet), a.flow);
      }
      return;
    }
    const RendezvousSpec& spec = sc_.rendezvous[a.rendezvous];
    if (a.role == Role::kService) {
      a.service.emplace(std::move(a.pending.session), spec.label, rng_);
    }
    const auto [svc, cli] = pairs_[a.rendezvous];
    if (!agents_[svc].service || !agents_[cli].active || agents_[cli].client) return;
    Agent& client = agents_[cli];
    try {
      client.client.emplace(std::move(client.pending.session), agents_[svc].service->record(),
                            now(), rng_);
      flow.result.established = true;
      OutboundData hello = client.client->connect(now(), rng_);
      send(client.node, hello.next_hop, encode(hello.packet), client.flow);
      for (std::size_t k = 0; k < spec.messages; ++k) {
        const Bytes m = message(spec.size);
        flow.awaiting_forward.insert(m);
        flow.awaiting_backward.insert(m);
        OutboundData out = client.client->send(m, now(), rng_);
        send(client.node, out.next_hop, encode(out.packet), client.flow);
      }
    } catch (const Error& e) {
      report_.drops.push_back({tick_, name(client.node), name(client.node), e.what()});
    }
  }

  static void tally(std::multiset<Bytes>& awaiting, const Bytes& got, std::size_t& delivered,
                    std::size_t& correct) {
    ++delivered;
    auto it = awaiting.find(got);
    if (it != awaiting.end()) {
      awaiting.erase(it);
      ++correct;
    }
  }

  bool handle_as_endpoint(const Event& ev, const DataPacket& packet) {
    for (std::size_t index : agents_at_[ev.to - 1]) {
      Agent& a = agents_[index];
      if (!a.active) continue;
      Flow& flow = flows_[a.flow];
      SessionResult& r = flow.result;
      try {
        if (a.service) {
          if (!a.service->matches(packet)) continue;
          auto got = a.service->receive(packet);
          if (got.data) {
            tally(flow.awaiting_forward, *got.data, r.forward_delivered, r.forward_correct);
            OutboundData out = a.service->send(got.conn, *got.data, now(), rng_);
            send(a.node, out.next_hop, encode(out.packet), a.flow);
          }
          return true;
        }
        if (a.client) {
          if (!a.client->matches(packet)) continue;
          const Bytes got = a.client->receive(packet);
          tally(flow.awaiting_backward, got, r.backward_delivered, r.backward_correct);
          return true;
        }
        if (a.role == Role::kPlain && source_matches_data(a.pending.session, packet)) {
          PlaintextBlock block = source_receive_data(a.pending.session, packet);
          tally(flow.awaiting_backward, block.data, r.backward_delivered, r.backward_correct);
          return true;
        }
      } catch (const Error& e) {
        drop(ev, e.what());
        return true;
      }
    }
    return false;
  }

  void handle_data(const Event& ev, const DataPacket& packet) {
    if (handle_as_endpoint(ev, packet)) return;
    try {
      const std::uint64_t dh_before = crypto::counters().dh_calls.load();
      DataStep step = node_process_data(node(ev.to), packet, now());
      report_.dh_calls_in_transit += crypto::counters().dh_calls.load() - dh_before;
      if (!step.delivered) {
        send(ev.to, step.route.next_hop, encode(step.packet), ev.flow);
        return;
      }
      DestinationHost& host = hosts_[ev.to - 1];
      std::optional<Bytes> data = host.receive(step);
      if (!data) return;
      Flow& flow = flows_[ev.flow];
      tally(flow.awaiting_forward, *data, flow.result.forward_delivered,
            flow.result.forward_correct);
      if (echo_[ev.to - 1]) {
        OutboundData out = host.reply(step.key, *data, rng_);
        send(ev.to, out.next_hop, encode(out.packet), ev.flow);
      }
    } catch (const Error& e) {
      drop(ev, e.what());
    }
  }

  void check_invariants() {
    check_key_confinement();
    check_statelessness();
    check_length_invariance();
    check_unlinkability();
  }

  void check_key_confinement() {
    InvariantResult inv{"key_confinement", 0, {}};
    std::vector<SymKey> keys;
    for (const NodeState& n : nodes_) keys.push_back(n.sv);
    for (Agent& a : agents_) {
      SessionState& s = a.session();
      keys.insert(keys.end(), s.keys.forward.begin(), s.keys.forward.end());
      keys.insert(keys.end(), s.keys.backward.begin(), s.keys.backward.end());
      if (a.active) keys.push_back(s.dest_key);
    }
    std::unordered_set<std::string_view> secret;
    for (const SymKey& k : keys) {
      secret.insert(std::string_view(reinterpret_cast<const char*>(k.bytes.data()), kKeySize));
    }
    for (const WireCopy& w : wire_) {
      for (std::size_t off = 0; off + kKeySize <= w.bytes.size(); ++off) {
        const std::string_view v(reinterpret_cast<const char*>(w.bytes.data() + off), kKeySize);
        if (secret.count(v)) {
          ++inv.violations;
          inv.details.push_back("key bytes on link " + name(w.from) + "->" + name(w.to) +
                                " at offset " + std::to_string(off));
        }
      }
    }
    report_.invariants.push_back(std::move(inv));
  }

  void check_statelessness() {
    InvariantResult inv{"statelessness", 0, {}};
    for (std::uint32_t id = 1; id <= nodes_.size(); ++id) {
      std::size_t entries = hosts_[id - 1].session_count();
      for (std::size_t index : agents_at_[id - 1]) {
        const Agent& a = agents_[index];
        entries += 1 + (a.service ? a.service->connection_count() : 0);
      }
      report_.session_entries[name(id)] = entries;
      if (entries != 0 && !endpoints_.count(name(id))) {
        ++inv.violations;
        inv.details.push_back(name(id) + " holds " + std::to_string(entries) +
                              " session entries");
      }
    }
    report_.endpoints.assign(endpoints_.begin(), endpoints_.end());
    report_.invariants.push_back(std::move(inv));
  }

  void check_length_invariance() {
    InvariantResult inv{"length_invariance", 0, {}};
    for (const WireCopy& w : wire_) {
      if (w.tampered) continue;
      std::size_t header_end = 0;
      const std::string kind = kind_of(w.bytes, &header_end);
      bool ok = true;
      if (kind == "setup") {
        ok = w.bytes.size() == kSetupPacketSize;
      } else if (kind != "garbled") {
        ok = w.bytes.size() - header_end == flows_[w.flow].payload_size;
      }
      if (!ok) {
        ++inv.violations;
        inv.details.push_back(kind + " packet of " + std::to_string(w.bytes.size()) +
                              " bytes on " + name(w.from) + "->" + name(w.to));
      }
    }
    report_.invariants.push_back(std::move(inv));
  }

  // Index 16-byte windows at every 8-byte offset (which covers every field
  // boundary of both packet formats), then test every offset of every
  // packet against packets seen on other links.
  void check_unlinkability() {
    InvariantResult inv{"unlinkability", 0, {}};
    constexpr std::size_t w = 16;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> index;
    for (std::size_t i = 0; i < wire_.size(); ++i) {
      for (std::size_t off = 0; off + w <= wire_[i].bytes.size(); off += 8) {
        index.emplace_back(window_hash(wire_[i].bytes.data() + off), (i << 16) | off);
      }
    }
    std::sort(index.begin(), index.end());
    std::vector<std::uint64_t> bloom((std::size_t{1} << 26) / 64, 0);
    const std::uint64_t mask = (std::uint64_t{1} << 26) - 1;
    for (const auto& e : index) bloom[(e.first & mask) / 64] |= std::uint64_t{1} << (e.first % 64);

    for (std::size_t i = 0; i < wire_.size(); ++i) {
      const WireCopy& a = wire_[i];
      for (std::size_t off = 0; off + w <= a.bytes.size(); ++off) {
        const std::uint64_t h = window_hash(a.bytes.data() + off);
        if (!(bloom[(h & mask) / 64] >> (h % 64) & 1)) continue;
        auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(h, std::uint64_t{0}));
        for (; it != index.end() && it->first == h; ++it) {
          const WireCopy& b = wire_[it->second >> 16];
          const std::size_t boff = it->second & 0xffff;
          if (a.from == b.from && a.to == b.to) continue;
          if (std::memcmp(a.bytes.data() + off, b.bytes.data() + boff, w) != 0) continue;
          if (off < a.header_end) {
            ++report_.header_collisions;
          } else {
            ++report_.payload_collisions;
          }
          if (inv.details.size() < 20) {
            inv.details.push_back("window at " + name(a.from) + "->" + name(a.to) + "+" +
                                  std::to_string(off) + " also on " + name(b.from) + "->" +
                                  name(b.to) + "+" + std::to_string(boff));
          }
          ++inv.violations;
          break;
        }
      }
    }
    report_.invariants.push_back(std::move(inv));
  }

  const Scenario& sc_;
  Rng rng_;
  Rng adversary_rng_;
  std::vector<NodeState> nodes_;
  std::vector<DestinationHost> hosts_;
  std::vector<bool> echo_;
  std::vector<Agent> agents_;
  std::vector<std::vector<std::size_t>> agents_at_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<Flow> flows_;
  std::set<std::string> endpoints_;
  std::vector<std::uint64_t> seen_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_seq_ = 0;
  std::vector<WireCopy> wire_;
  TranscriptReport report_;
};

}  // namespace

TranscriptReport run_scenario(const Scenario& scenario) {
  scenario.validate();
  crypto::init();
  return Simulator(scenario).run();
}

nlohmann::json TranscriptReport::to_json() const {
  using nlohmann::json;
  json j;
  j["seed"] = seed;
  j["final_tick"] = final_tick;
  j["packets_sent"] = packets_sent;
  j["all_delivered"] = all_delivered();
  json sess = json::array();
  for (const auto& s : sessions) {
    sess.push_back({{"name", s.name},
                    {"rendezvous", s.rendezvous},
                    {"established", s.established},
                    {"messages", s.messages},
                    {"echo", s.echo},
                    {"forward_delivered", s.forward_delivered},
                    {"forward_correct", s.forward_correct},
                    {"backward_delivered", s.backward_delivered},
                    {"backward_correct", s.backward_correct},
                    {"complete", s.complete()}});
  }
  j["sessions"] = sess;
  json drops_j = json::array();
  for (const auto& d : drops) {
    drops_j.push_back({{"tick", d.tick}, {"node", d.node}, {"from", d.from}, {"error", d.error}});
  }
  j["drops"] = drops_j;
  j["interceptor_hits"] = interceptor_hits;
  json nodes = json::object();
  for (const auto& [node, list] : observed) {
    json obs = json::array();
    for (const auto& o : list) {
      obs.push_back({{"tick", o.tick}, {"from", o.from}, {"kind", o.kind}, {"size", o.size},
                     {"digest", o.digest}});
    }
    const bool endpoint = std::find(endpoints.begin(), endpoints.end(), node) != endpoints.end();
    auto entries = session_entries.find(node);
    nodes[node] = {{"endpoint", endpoint},
                   {"session_entries", entries == session_entries.end() ? 0 : entries->second},
                   {"observed", obs}};
  }
  j["nodes"] = nodes;
  json recs = json::array();
  for (const auto& r : recordings) {
    recs.push_back({{"tick", r.tick}, {"from", r.from}, {"to", r.to}, {"hex", to_hex(r.bytes)}});
  }
  j["recordings"] = recs;
  json inv = json::object();
  for (const auto& i : invariants) {
    inv[i.name] = {{"violations", i.violations}, {"details", i.details}};
  }
  inv["unlinkability"]["header_collisions"] = header_collisions;
  inv["unlinkability"]["payload_collisions"] = payload_collisions;
  j["invariants"] = inv;
  j["dh_calls_in_transit"] = dh_calls_in_transit;
  j["violations"] = violations();
  return j;
}

void TranscriptReport::write_hexdump(std::ostream& out) const {
  for (const auto& r : recordings) {
    out << "# tick " << r.tick << " " << r.from << " -> " << r.to << " (" << r.bytes.size()
        << " bytes)\n"
        << hex_dump(r.bytes) << "\n";
  }
}

}  // namespace hornet::simnet
