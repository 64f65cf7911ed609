// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "harness.hpp"
#include "hornet/error.hpp"
#include "hornet/simnet/anonset.hpp"
#include "hornet/simnet/bench.hpp"
#include "hornet/simnet/network.hpp"

namespace {

using namespace hornet;
using nlohmann::json;
using testing::kSource;
using testing::LineNet;
namespace sim = hornet::simnet;

const std::filesystem::path kRoot = HORNET_SOURCE_DIR;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

template <typename F>
bool throws(F&& f) {
  try {
    f();
  } catch (const Error&) {
    return true;
  }
  return false;
}

// S - F1 - ... - F_lf(=D) - B1 - ... - B_lb - S
json ring_scenario(std::size_t lf, std::size_t lb, std::size_t messages, std::uint64_t seed) {
  json nodes = json::array({{{"name", "S"}}});
  json links = json::array();
  std::vector<std::string> fwd, bwd;
  for (std::size_t i = 1; i <= lf; ++i) fwd.push_back("F" + std::to_string(i));
  for (std::size_t j = 1; j <= lb; ++j) bwd.push_back("B" + std::to_string(j));
  std::vector<std::string> ring{"S"};
  ring.insert(ring.end(), fwd.begin(), fwd.end());
  ring.insert(ring.end(), bwd.begin(), bwd.end());
  for (std::size_t i = 1; i < ring.size(); ++i) nodes.push_back({{"name", ring[i]}});
  ring.push_back("S");
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    links.push_back({{"a", ring[i]}, {"b", ring[i + 1]}, {"type", "customer-provider"}});
  }
  json j;
  j["seed"] = seed;
  j["topology"] = {{"nodes", nodes}, {"links", links}};
  j["sessions"] = json::array({{{"name", "flow"},
                                {"source", "S"},
                                {"forward", fwd},
                                {"backward", bwd},
                                {"payload_size", 512},
                                {"traffic", {{"messages", messages}, {"size", 64}, {"echo", true}}}}});
  return j;
}

// --- 1 ----------------------------------------------------------------------

Outcome header_sizes() {
  Outcome o;
  o.require(sizeof(Ahdr::bytes) == 336, "AHDR is not 336 bytes");
  o.require(sizeof(NestedAhdr::bytes) == 672, "nested AHDR is not 672 bytes");
  o.require(3 * kMaxHops * kKeySize == kAhdrSize, "3rs != AHDR size");
  o.require(kBlockSize == 48 && kFsSize == 32, "c or |FS| wrong");
  o.require(kPaperDataHeaderSize == 344, "paper data header is not 344");
  o.require(kDataHeaderSize == kPaperDataHeaderSize + kIvSize, "data header is not 344 + 16");

  LineNet net(3, 2, 1);
  net.tracing = true;
  SessionState s = net.establish(60, 512);
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  for (const auto& c : net.wire) {
    if (c.bytes[0] <= 2) {
      o.require(c.bytes.size() == kSetupPacketSize, "setup packet length");
    } else {
      o.require(c.bytes.size() == kDataHeaderSize + 512, "data packet length");
    }
  }
  DataPacket nested;
  nested.chdr.nested = true;
  nested.header = NestedAhdr{};
  nested.payload = Bytes(512);
  o.require(encode(nested).size() == kNestedDataHeaderSize + 512, "nested packet length");
  o.detail << "AHDR " << kAhdrSize << ", nested " << kNestedAhdrSize << ", data header "
           << kPaperDataHeaderSize << "+" << kIvSize << ", setup " << kSetupPacketSize;
  return o;
}

// --- 2 ----------------------------------------------------------------------

Outcome session_matrix() {
  Outcome o;
  std::size_t runs = 0, echoes = 0;
  for (std::size_t lf = 1; lf <= kMaxHops; ++lf) {
    for (std::size_t lb = 1; lb <= kMaxHops; ++lb) {
      const sim::Scenario sc = sim::Scenario::from_json(ring_scenario(lf, lb, 10, 100 * lf + lb));
      const sim::TranscriptReport r = sim::run_scenario(sc);
      const sim::SessionResult& res = r.sessions.at(0);
      const std::string tag = "(" + std::to_string(lf) + "," + std::to_string(lb) + ")";
      o.require(res.established, tag + " not established");
      o.require(res.forward_correct == 10 && res.forward_delivered == 10, tag + " forward");
      o.require(res.backward_correct == 10 && res.backward_delivered == 10, tag + " echo");
      o.require(r.drops.empty(), tag + " drops");
      o.require(r.violations() == 0, tag + " invariant violations");
      ++runs;
      echoes += res.backward_correct;
    }
  }
  o.detail << runs << " path-length pairs, " << echoes << " echoes, 0 violations";
  return o;
}

// --- 3 ----------------------------------------------------------------------

// Receiving node's full treatment of raw bytes: parse, then process.
bool node_rejects(const LineNet& net, std::uint32_t node, ByteSpan raw) {
  return throws([&] {
    const Packet p = decode(raw);
    if (const auto* s = std::get_if<SetupPacket>(&p)) {
      node_process_setup(net.nodes.at(node), *s, net.now);
    } else {
      node_process_data(net.nodes.at(node), std::get<DataPacket>(p), net.now);
    }
  });
}

void flip(Bytes& b, std::size_t bit) { b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8)); }

Outcome integrity() {
  Outcome o;
  Rng pick(3003);
  std::size_t ahdr = 0, sphinx = 0, chdr = 0, fsp = 0, accepted = 0;

  for (int round = 0; round < 8; ++round) {
    const std::size_t lf = 1 + pick.uniform(kMaxHops);
    const std::size_t lb = 1 + pick.uniform(kMaxHops);
    LineNet net(lf, lb, 3000 + round);

    // Setup traffic, kept so the FS payload can be attacked on its last link.
    net.tracing = true;
    PendingSetup pending = source_begin_setup(net.request(), net.now, net.rng);
    const SetupPacket p2 = net.run_setup(pending.outbound);
    const std::vector<testing::Captured> setup_wire = net.wire;
    SessionState s = pending.session;
    source_complete_setup(s, p2, net.rng);
    net.wire.clear();
    net.deliver(source_control_packet(s, net.now, net.rng), s);
    for (int i = 0; i < 3; ++i) {
      net.deliver(source_send_data(s, Bytes{1, 2, 3}, net.now, net.rng), s);
      net.deliver(net.destination.reply(s.dest_key, Bytes{4, 5}, net.rng), s);
    }
    const std::vector<testing::Captured> data_wire = net.wire;

    auto transit = [](const std::vector<testing::Captured>& w) {
      std::vector<const testing::Captured*> out;
      for (const auto& c : w) {
        if (c.to != kSource) out.push_back(&c);
      }
      return out;
    };
    const auto setup_links = transit(setup_wire);
    const auto data_links = transit(data_wire);

    for (int k = 0; k < 40; ++k) {
      // AHDR of a data packet: bytes 24 .. 360.
      const auto* c = data_links[pick.uniform(data_links.size())];
      Bytes b = c->bytes;
      flip(b, 8 * (kChdrSize + kIvSize) + pick.uniform(8 * kAhdrSize));
      if (!node_rejects(net, c->to, b)) ++accepted;
      ++ahdr;

      // Sphinx header of a setup packet: bytes 8 .. 392.
      const auto* sp = setup_links[pick.uniform(setup_links.size())];
      b = sp->bytes;
      flip(b, 8 * kChdrSize + pick.uniform(8 * kSphinxHeaderSize));
      if (!node_rejects(net, sp->to, b)) ++accepted;
      ++sphinx;

      // Common header of either kind.
      const auto* any = pick.uniform(2) ? sp : c;
      b = any->bytes;
      flip(b, pick.uniform(8 * kChdrSize));
      if (!node_rejects(net, any->to, b)) ++accepted;
      ++chdr;

      // FS payload on the last setup link; the source is the node that
      // unwinds it.
      SetupPacket t = p2;
      const std::size_t bit = pick.uniform(8 * kFsPayloadSize);
      t.fs_payload.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      SessionState copy = pending.session;
      if (!throws([&] { source_complete_setup(copy, t, net.rng); })) ++accepted;
      ++fsp;
    }
  }
  const std::size_t flips = ahdr + sphinx + chdr + fsp;
  o.require(flips >= 1000, "fewer than 1000 flips");
  o.require(accepted == 0, std::to_string(accepted) + " flipped packets accepted");

  Rng rng(3100);
  std::size_t rejected = 0;
  const std::size_t headers = 1000;
  for (std::size_t i = 0; i < headers; ++i) {
    Ahdr h;
    rng.fill(h.bytes);
    const SymKey sv = rng.key();
    if (throws([&] { proc_ahdr(sv, h, {0}); })) ++rejected;
  }
  o.require(rejected >= 999, "random headers accepted");
  o.detail << flips << " flips (AHDR " << ahdr << ", setup header " << sphinx << ", chdr " << chdr
           << ", FS payload " << fsp << "), " << accepted << " accepted; random headers "
           << rejected << "/" << headers << " rejected";
  return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome round_trips() {
  Outcome o;
  Rng rng(4004);
  constexpr int kInstances = 100;
  std::size_t total = 0;
  for (std::size_t l = 1; l <= kMaxHops; ++l) {
    for (int n = 0; n < kInstances; ++n) {
      const ExpiryTime exp{static_cast<std::uint32_t>(1 + rng.uniform(1u << 30))};
      std::vector<SymKey> svs, keys;
      std::vector<ForwardingSegment> fses;
      std::vector<RoutingSegment> routes;
      for (std::size_t i = 0; i < l; ++i) {
        svs.push_back(rng.key());
        keys.push_back(rng.key());
        routes.push_back({static_cast<std::uint32_t>(rng.next_u64()),
                          static_cast<std::uint16_t>(rng.next_u64()),
                          static_cast<std::uint16_t>(rng.uniform(2))});
        fses.push_back(fs_create(svs[i], keys[i], routes[i], exp));
      }

      // FS payload.
      const SymKey seed = rng.key();
      FsPayload p = init_fs_payload(seed);
      for (std::size_t i = 0; i < l; ++i) p = add_fs(keys[i], fses[i], p);
      o.require(retrieve_fses(p, seed, keys) == fses, "retrieve_fses");

      // Anonymous header.
      Ahdr h = create_ahdr(keys, fses, rng);
      for (std::size_t i = 0; i < l; ++i) {
        const AhdrStep st = proc_ahdr(svs[i], h, {exp.decaseconds - 1});
        o.require(st.key == keys[i] && st.route == routes[i] && st.exp == exp, "proc_ahdr");
        h = st.next;
      }

      // Onion payload, both directions.
      Iv iv;
      rng.fill(iv.bytes);
      const Bytes plain = rng.bytes(16 * (2 + rng.uniform(255)));
      const LayerResult w = wrap_forward(keys, iv, plain);
      const LayerResult u = unwrap_forward(keys, w.iv, w.payload);
      o.require(u.payload == plain && u.iv == iv, "onion forward");
      const SymKey dest = rng.key();
      LayerResult back = add_layer(dest, iv, plain);
      for (const SymKey& k : keys) back = add_layer(k, back.iv, back.payload);
      o.require(unwrap_backward(keys, dest, back.iv, back.payload) == plain, "onion backward");
      total += 4;
    }

    // Sphinx payloads need node secrets along a real header.
    for (int n = 0; n < kInstances; ++n) {
      BootstrapInput in;
      in.source_secret = rng.scalar();
      std::vector<Scalar> fsec, bsec;
      for (std::size_t i = 0; i < l; ++i) {
        fsec.push_back(rng.scalar());
        bsec.push_back(rng.scalar());
        in.forward.push_back({crypto::public_from_secret(fsec[i]), {1, 0, 0}});
        in.backward.push_back({crypto::public_from_secret(bsec[i]), {1, 0, 0}});
      }
      CommonHeader chdr;
      chdr.exp = {77};
      const SphinxHeaders hs = gen_sphx_hdr(in, chdr, rng);
      const Bytes inner = rng.bytes(rng.uniform(kSphinxPayloadCapacity + 1));
      SphinxHeader hdr = hs.forward;
      SphinxPayload pl = gen_sphx_pl_send(hs.keys.forward, inner);
      for (std::size_t i = 0; i < l; ++i) {
        SphinxStep st = proc_sphx_pkt(hdr, pl, fsec[i], chdr);
        hdr = st.header;
        pl = st.payload;
      }
      const SymKey dest = hs.keys.forward.back();
      o.require(unwrap_sphx_pl_send(dest, pl) == inner, "Sphinx send payload");

      CommonHeader bchdr = chdr;
      bchdr.type = PacketType::kSetupBackward;
      hdr = hs.backward;
      pl = gen_sphx_pl_recv(dest, inner);
      for (std::size_t i = 0; i < l; ++i) {
        SphinxStep st = proc_sphx_pkt(hdr, pl, bsec[i], bchdr);
        hdr = st.header;
        pl = st.payload;
      }
      o.require(unwrap_sphx_pl_recv(hs.keys.backward, dest, pl) == inner, "Sphinx recv payload");
      total += 2;
    }
  }
  o.detail << total << " round trips, " << kInstances << " per kind and path length";
  return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome replay_and_expiry() {
  Outcome o;
  std::size_t boundary_checks = 0;
  for (std::size_t l = 1; l <= kMaxHops; ++l) {
    LineNet net(l, l, 5000 + l);
    // Setup packets at every forward node.
    PendingSetup p = source_begin_setup(net.request(1), net.now, net.rng);
    const ExpiryTime exp = p.session.exp;
    SetupPacket sp = p.outbound.packet;
    std::uint32_t hop = p.outbound.next_hop;
    for (std::size_t i = 0; i < l; ++i) {
      const NodeState& n = net.nodes.at(hop);
      o.require(throws([&] { node_process_setup(n, sp, exp); }), "setup accepted at EXP");
      o.require(throws([&] { node_process_setup(n, sp, {exp.decaseconds + 1}); }),
                "setup accepted after EXP");
      const SetupStep st = node_process_setup(n, sp, {exp.decaseconds - 1});
      boundary_checks += 3;
      sp = st.packet;
      hop = st.route.next_hop;
    }

    // Data packets at every node of both paths.
    SessionState s = net.establish(1);
    const auto check_path = [&](OutboundData out) {
      DataPacket d = out.packet;
      std::uint32_t h = out.next_hop;
      while (h != kSource) {
        const NodeState& n = net.nodes.at(h);
        for (std::uint32_t late : {s.exp.decaseconds, s.exp.decaseconds + 1}) {
          try {
            node_process_data(n, d, {late});
            o.require(false, "data accepted at or after EXP");
          } catch (const Error& e) {
            o.require(e.code() == ErrorCode::kSessionExpired, "wrong error at EXP");
          }
        }
        const DataStep st = node_process_data(n, d, {s.exp.decaseconds - 1});
        boundary_checks += 3;
        if (st.delivered) return;
        d = st.packet;
        h = st.route.next_hop;
      }
    };
    check_path(source_send_data(s, Bytes{1}, net.now, net.rng));
    net.deliver(source_control_packet(s, net.now, net.rng), s);
    check_path(net.destination.reply(s.dest_key, Bytes{2}, net.rng));
  }

  // Duplicates within the window, both directions.
  LineNet net(3, 3, 5100);
  SessionState s = net.establish();
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  std::vector<OutboundData> fwd, bwd;
  for (int i = 0; i < 1100; ++i) {
    fwd.push_back(source_send_data(s, Bytes{static_cast<std::uint8_t>(i)}, net.now, net.rng));
    net.deliver(fwd.back(), s);
    bwd.push_back(net.destination.reply(s.dest_key, Bytes{7}, net.rng));
    net.deliver(bwd.back(), s);
  }
  std::size_t tried = 0, detected = 0;
  for (const auto* list : {&fwd, &bwd}) {
    for (std::size_t i = list->size() - ReplayWindow::kWidth; i < list->size(); ++i) {
      ++tried;
      try {
        net.deliver((*list)[i], s);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kReplayDetected) ++detected;
      }
    }
  }
  o.require(detected == tried, "duplicates slipped through");
  o.detail << boundary_checks << " expiry boundary checks; duplicates detected " << detected
           << "/" << tried;
  return o;
}

// --- 6 and 9 ----------------------------------------------------------------

struct SimRuns {
  sim::TranscriptReport line;
  sim::TranscriptReport rendezvous;
};

const SimRuns& sim_runs() {
  static const SimRuns runs = [] {
    SimRuns r;
    r.line = sim::run_scenario(sim::Scenario::from_json(ring_scenario(7, 7, 500, 6006)));
    r.rendezvous = sim::run_scenario(sim::Scenario::load(kRoot / "scenarios/rendezvous.json"));
    return r;
  }();
  return runs;
}

std::size_t end_to_end_packets(const sim::TranscriptReport& r) {
  std::size_t n = 0;
  for (const auto& s : r.sessions) n += s.forward_delivered + s.backward_delivered;
  return n;
}

Outcome statelessness() {
  Outcome o;
  const SimRuns& runs = sim_runs();
  std::size_t transit_nodes = 0;
  for (const sim::TranscriptReport* r : {&runs.line, &runs.rendezvous}) {
    o.require(r->all_delivered(), "scenario incomplete");
    for (const auto& [node, entries] : r->session_entries) {
      const bool endpoint =
          std::find(r->endpoints.begin(), r->endpoints.end(), node) != r->endpoints.end();
      if (endpoint) continue;
      ++transit_nodes;
      o.require(entries == 0, node + " holds session state");
    }
  }
  const auto rp = runs.rendezvous.session_entries.find("R");
  o.require(rp != runs.rendezvous.session_entries.end() && rp->second == 0, "RP holds state");
  o.require(end_to_end_packets(runs.line) >= 1000, "fewer than 1000 packets");
  o.detail << end_to_end_packets(runs.line) << " packets over 7+7 hops plus rendezvous; "
           << transit_nodes << " non-endpoint nodes (RP included) hold 0 entries";
  return o;
}

Outcome unlinkability() {
  Outcome o;
  const SimRuns& runs = sim_runs();
  std::size_t header = 0, payload = 0;
  for (const sim::TranscriptReport* r : {&runs.line, &runs.rendezvous}) {
    header += r->header_collisions;
    payload += r->payload_collisions;
    for (const auto& inv : r->invariants) {
      o.require(inv.violations == 0, inv.name + " violated");
    }
  }
  o.require(header == 0, "header window collisions");
  o.require(payload == 0, "payload window collisions");
  o.detail << end_to_end_packets(runs.line) + end_to_end_packets(runs.rendezvous)
           << " packets; cross-link 16-byte window matches: header " << header << ", payload "
           << payload;
  return o;
}

// --- 7 ----------------------------------------------------------------------


sim::Topology random_topology(Rng& rng, std::size_t n) {
  sim::Topology t;
  for (std::size_t i = 0; i < n; ++i) t.add_node("N" + std::to_string(i), 1 + rng.uniform(50));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rng.uniform(100) >= 35) continue;
      const std::string na = "N" + std::to_string(a), nb = "N" + std::to_string(b);
      const auto k = rng.uniform(3);
      if (k == 0) t.add_link({na, nb, sim::Relationship::kCustomerProvider});
      if (k == 1) t.add_link({nb, na, sim::Relationship::kCustomerProvider});
      if (k == 2) t.add_link({na, nb, sim::Relationship::kPeer});
    }
  }
  return t;
}

Outcome anonymity_sets() {
  Outcome o;
  std::ifstream in(kRoot / "scenarios/fig4a.json");
  const json j = json::parse(in);
  const sim::Topology t = sim::Topology::from_json(j);
  std::uint64_t expect = 0;
  for (const auto& n : j.at("nodes")) {
    const std::string name = n.at("name");
    if (name >= "AS1" && name <= "AS5") expect += n.value("weight", 1u);
  }
  const sim::AnonymitySet all = sim::anonymity_set(t, "AS0", "AS1");
  const sim::AnonymitySet four = sim::anonymity_set(t, "AS0", "AS1", 4);
  o.require(all.weight == expect, "AS1..AS5 weight sum");
  o.require(four.members == std::vector<std::string>{"AS4"}, "distance 4 members");
  o.require(four.weight == t.weight("AS4"), "distance 4 weight");

  Rng rng(7007);
  std::size_t cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const sim::Topology r = random_topology(rng, 3 + rng.uniform(10));
    for (const auto& adv : r.nodes()) {
      for (const auto& ingress : r.neighbors(adv)) {
        o.require(sim::anonymity_set(r, adv, ingress) ==
                      sim::anonymity_set_brute_force(r, adv, ingress),
                  "enumeration disagrees with brute force");
        const unsigned d = 1 + static_cast<unsigned>(rng.uniform(6));
        o.require(sim::anonymity_set(r, adv, ingress, d) ==
                      sim::anonymity_set_brute_force(r, adv, ingress, d),
                  "distance-constrained enumeration disagrees");
        cases += 2;
      }
    }
  }
  o.detail << "AS0 via AS1: " << all.weight << " (expected " << expect << "); distance 4: "
           << four.weight << " {AS4}; " << cases << " brute-force comparisons on <= 12 nodes";
  return o;
}

// --- 8 ----------------------------------------------------------------------

Outcome performance() {
  Outcome o;
  sim::BenchConfig cfg;
  cfg.data_iterations = 10000;
  cfg.setup_iterations = 200;
  const sim::BenchReport r = sim::bench(cfg);
  o.require(r.data_dh_calls == 0, "group operations on the data path");
  o.require(r.ratio >= 50.0, "setup/data ratio below 50");
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "setup median %.1f us, data median %.0f ns, ratio %.1f, data-path DH calls %llu "
                "(%s AES)",
                r.setup.median_ns / 1000.0, r.data.median_ns, r.ratio,
                static_cast<unsigned long long>(r.data_dh_calls), r.aes_backend);
  o.detail << buf;
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  crypto::init();
  const Criterion criteria[] = {
      {1, "header sizes", 1, header_sizes},
      {2, "end-to-end matrix", 30, session_matrix},
      {3, "integrity", 60, integrity},
      {4, "round trips", 60, round_trips},
      {5, "replay and expiry", 10, replay_and_expiry},
      {6, "statelessness", 30, statelessness},
      {7, "anonymity sets", 10, anonymity_sets},
      {8, "performance", 120, performance},
      {9, "unlinkability", 30, unlinkability},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s %d %s: %s [%.2f s of %.0f s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.str().c_str(), secs, c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
