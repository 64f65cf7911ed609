#include "hornet/vectors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hornet/error.hpp"
#include "hornet/protocol.hpp"

namespace hornet::vectors {

namespace {

SymKey counting_key(std::uint8_t start) {
  SymKey k;
  for (std::size_t i = 0; i < k.bytes.size(); ++i) k.bytes[i] = static_cast<std::uint8_t>(start + i);
  return k;
}

template <typename T>
Bytes to_bytes(const T& array) {
  return Bytes(array.begin(), array.end());
}

const char* label_name(SubkeyLabel l) {
  switch (l) {
    case SubkeyLabel::kMac: return "mac";
    case SubkeyLabel::kPrg0: return "prg0";
    case SubkeyLabel::kPrg1: return "prg1";
    case SubkeyLabel::kPrg2: return "prg2";
    case SubkeyLabel::kPrp: return "prp";
    case SubkeyLabel::kEnc: return "enc";
    case SubkeyLabel::kDec: return "dec";
  }
  return "?";
}

VectorFile crypto_vectors() {
  VectorFile f{"crypto.hex", "symmetric primitives under key 00 01 .. 0f", {}};
  const SymKey key = counting_key(0);
  for (SubkeyLabel l : kAllSubkeyLabels) {
    f.blobs.push_back({std::string("derive_subkey/") + label_name(l),
                       to_bytes(crypto::derive_subkey(key, l).bytes)});
  }
  Bytes msg(40);
  for (std::size_t i = 0; i < msg.size(); ++i) msg[i] = static_cast<std::uint8_t>(i);
  f.blobs.push_back({"mac/40-byte-counter", to_bytes(crypto::mac(key, msg))});
  f.blobs.push_back({"prg0/96", crypto::prg(key, PrgVariant::k0, 96)});
  f.blobs.push_back({"prg1/96", crypto::prg(key, PrgVariant::k1, 96)});
  f.blobs.push_back({"prg2/96", crypto::prg(key, PrgVariant::k2, 96)});
  Bytes block16(msg.begin(), msg.begin() + 16);
  Bytes block32(msg.begin(), msg.begin() + 32);
  f.blobs.push_back({"prp/16", crypto::prp_wide(key, block16, PrpDirection::kForward)});
  f.blobs.push_back({"prp/32", crypto::prp_wide(key, block32, PrpDirection::kForward)});
  f.blobs.push_back(
      {"stream/32", crypto::stream_xcrypt(key, block16, block32, CipherDirection::kEncrypt)});
  f.blobs.push_back({"hash_to_key/abc",
                     to_bytes(crypto::hash_to_key("hornet/vectors", Bytes{'a', 'b', 'c'}).bytes)});
  const Scalar a = crypto::scalar_from_u64(7);
  const Scalar b = crypto::scalar_from_u64(11);
  const GroupElement ga = crypto::public_from_secret(a);
  f.blobs.push_back({"group/7G", to_bytes(ga.bytes)});
  f.blobs.push_back({"group/11*7G", to_bytes(crypto::dh(b, ga).bytes)});
  return f;
}

VectorFile forwarding_vectors() {
  VectorFile f{"forwarding.hex", "common headers, routing segments and forwarding segments", {}};
  CommonHeader setup;
  setup.type = PacketType::kSetupForward;
  setup.exp = ExpiryTime{0x01020304};
  f.blobs.push_back({"chdr/setup-forward", to_bytes(setup.serialize())});
  CommonHeader data;
  data.type = PacketType::kDataBackward;
  f.blobs.push_back({"chdr/data-backward", to_bytes(data.serialize())});
  data.type = PacketType::kDataForward;
  data.nested = true;
  f.blobs.push_back({"chdr/data-forward-nested", to_bytes(data.serialize())});
  const RoutingSegment route{0x0a0b0c0d, 0x0102, RoutingSegment::kDestinationFlag};
  f.blobs.push_back({"routing-segment", to_bytes(route.serialize())});
  const SymKey sv = counting_key(0x80);
  const SymKey key = counting_key(0x10);
  const ForwardingSegment fs = fs_create(sv, key, route, ExpiryTime{100006});
  f.blobs.push_back({"fs", to_bytes(fs.sealed)});
  const FsPayload init = init_fs_payload(counting_key(0x20));
  f.blobs.push_back({"fs-payload/initial", to_bytes(init.bytes)});
  f.blobs.push_back({"fs-payload/one-insertion", to_bytes(add_fs(key, fs, init).bytes)});
  return f;
}

struct PathFixture {
  std::vector<SymKey> keys;
  std::vector<ForwardingSegment> fses;
};

PathFixture path_fixture(std::size_t hops) {
  PathFixture p;
  for (std::size_t i = 0; i < hops; ++i) {
    const auto n = static_cast<std::uint8_t>(i);
    p.keys.push_back(counting_key(static_cast<std::uint8_t>(0x40 + 16 * n)));
    const RoutingSegment r{static_cast<std::uint32_t>(i + 2), n,
                           static_cast<std::uint16_t>(i + 1 == hops ? 1 : 0)};
    p.fses.push_back(fs_create(counting_key(static_cast<std::uint8_t>(0xa0 + n)), p.keys.back(), r,
                               ExpiryTime{100006}));
  }
  return p;
}

VectorFile header_vectors() {
  VectorFile f{"headers.hex", "anonymous headers for 3-hop paths, padding from Rng(42)", {}};
  const PathFixture p = path_fixture(3);
  Rng rng(42);
  const Ahdr a = create_ahdr(p.keys, p.fses, rng);
  f.blobs.push_back({"ahdr/3-hop", to_bytes(a.bytes)});
  const PathFixture inner = path_fixture(2);
  const Ahdr in = create_ahdr(inner.keys, inner.fses, rng);
  f.blobs.push_back({"nested-ahdr/3-hop", to_bytes(create_nested_ahdr(p.keys, p.fses, in, rng).bytes)});
  return f;
}

VectorFile onion_vectors() {
  VectorFile f{"onion.hex", "onion layers on a 64-byte payload", {}};
  const SymKey key = counting_key(0x30);
  Iv iv;
  for (std::size_t i = 0; i < iv.bytes.size(); ++i) iv.bytes[i] = static_cast<std::uint8_t>(0xf0 + i);
  const Bytes payload(64, 0x11);
  const LayerResult one = add_layer(key, iv, payload);
  f.blobs.push_back({"add-layer/payload", one.payload});
  f.blobs.push_back({"add-layer/iv", to_bytes(one.iv.bytes)});
  PlaintextBlock block{5, false, Bytes{'h', 'o', 'r', 'n', 'e', 't'}};
  f.blobs.push_back({"sealed-block/64",
                     seal_block(key, FlowDirection::kForward, block, 64)});
  return f;
}

VectorFile packet_vectors() {
  VectorFile f{"packets.hex", "encoded packets of a 2-hop session built from Rng(7)", {}};
  Rng rng(7);
  NodeState n1 = NodeState::generate(1, rng);
  NodeState n2 = NodeState::generate(2, rng);
  NodeState n3 = NodeState::generate(3, rng);
  n1.neighbors = {9, 2};
  n2.neighbors = {1, 3};
  n3.neighbors = {2, 9};
  SessionRequest req;
  req.source_id = 9;
  req.forward = {{1, n1.dh_public, 1}, {2, n2.dh_public, 2}};
  req.backward = {{3, n3.dh_public, 3}};
  const ExpiryTime now{100000};
  req.exp = ExpiryTime{100006};
  req.payload_size = 384;
  PendingSetup pending = source_begin_setup(req, now, rng);
  f.blobs.push_back({"setup/p1", encode(pending.outbound.packet)});

  SetupPacket p = pending.outbound.packet;
  std::map<std::uint32_t, NodeState*> nodes{{1, &n1}, {2, &n2}, {3, &n3}};
  std::uint32_t hop = pending.outbound.next_hop;
  while (hop != 9) {
    SetupStep st = node_process_setup(*nodes[hop], p, now);
    if (st.at_destination) st = dest_turnaround(*nodes[hop], p, now);
    p = st.packet;
    hop = st.route.next_hop;
  }
  f.blobs.push_back({"setup/p2-at-source", encode(p)});
  source_complete_setup(pending.session, p, rng);
  f.blobs.push_back({"data/control", encode(source_control_packet(pending.session, now, rng).packet)});
  f.blobs.push_back(
      {"data/first", encode(source_send_data(pending.session, Bytes{'p', 'i', 'n', 'g'}, now, rng).packet)});
  return f;
}

Bytes parse_hex_line(const std::string& line) {
  std::istringstream in(line);
  std::string offset;
  in >> offset;
  std::string byte;
  Bytes out;
  while (in >> byte) {
    const Bytes b = from_hex(byte);
    if (b.size() != 1) throw std::invalid_argument("bad hex byte '" + byte + "'");
    out.push_back(b[0]);
  }
  return out;
}

}  // namespace

std::string VectorFile::render() const {
  std::string out = "# " + title + "\n";
  for (const Blob& b : blobs) {
    out += "@ " + b.name + "\n";
    out += hex_dump(b.bytes);
  }
  return out;
}

VectorFile VectorFile::parse(const std::string& filename, const std::string& text) {
  VectorFile f;
  f.filename = filename;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (f.title.empty()) f.title = line.size() > 2 ? line.substr(2) : "";
      continue;
    }
    if (line.rfind("@ ", 0) == 0) {
      f.blobs.push_back({line.substr(2), {}});
      continue;
    }
    if (f.blobs.empty()) throw std::invalid_argument(filename + ": bytes before any blob name");
    const Bytes b = parse_hex_line(line);
    f.blobs.back().bytes.insert(f.blobs.back().bytes.end(), b.begin(), b.end());
  }
  return f;
}

std::vector<VectorFile> generate() {
  crypto::init();
  return {crypto_vectors(), forwarding_vectors(), header_vectors(), onion_vectors(),
          packet_vectors()};
}

void write_all(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const VectorFile& f : generate()) {
    std::ofstream out(dir / f.filename, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / f.filename).string());
    out << f.render();
  }
}

std::vector<CheckResult> check_all(const std::filesystem::path& dir) {
  std::vector<CheckResult> results;
  for (const VectorFile& fresh : generate()) {
    std::ifstream in(dir / fresh.filename, std::ios::binary);
    if (!in) {
      results.push_back({fresh.filename, "", false, "missing file"});
      continue;
    }
    std::stringstream text;
    text << in.rdbuf();
    VectorFile committed;
    try {
      committed = VectorFile::parse(fresh.filename, text.str());
    } catch (const std::exception& e) {
      results.push_back({fresh.filename, "", false, e.what()});
      continue;
    }
    for (const Blob& want : fresh.blobs) {
      CheckResult r{fresh.filename, want.name, false, ""};
      auto it = std::find_if(committed.blobs.begin(), committed.blobs.end(),
                             [&](const Blob& b) { return b.name == want.name; });
      if (it == committed.blobs.end()) {
        r.detail = "blob missing";
      } else if (it->bytes != want.bytes) {
        r.detail = "bytes differ from a fresh generation";
      } else if (fresh.filename == "packets.hex") {
        try {
          r.ok = encode(decode(it->bytes)) == it->bytes;
          if (!r.ok) r.detail = "decode/encode changed the bytes";
        } catch (const Error& e) {
          r.detail = e.what();
        }
      } else {
        r.ok = true;
      }
      results.push_back(std::move(r));
    }
    if (committed.blobs.size() != fresh.blobs.size()) {
      results.push_back({fresh.filename, "", false, "unexpected extra blobs"});
    }
  }
  return results;
}

}  // namespace hornet::vectors
