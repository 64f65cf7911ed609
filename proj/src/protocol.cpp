#include "hornet/protocol.hpp"

#include <algorithm>
#include <cstring>

#include "hornet/error.hpp"

namespace hornet {
namespace {

// A normal session's first packet carries ahdr_b inside a sealed block.
constexpr std::size_t kMinSessionPayload = 368;

Iv random_iv(Rng& rng) {
  Iv iv;
  rng.fill(iv.bytes);
  return iv;
}

void require_active(const SessionState& s, ExpiryTime now) {
  if (!s.active) throw Error(ErrorCode::kInvalidArgument, "session setup not completed");
  if (now >= s.exp) throw Error(ErrorCode::kSessionExpired, "session lifetime is over");
}

SymKey block_mac_key(const SymKey& dest_key) {
  return crypto::derive_subkey(dest_key, SubkeyLabel::kMac);
}

Ahdr final_header(Ahdr header, std::span<const SymKey> keys) {
  for (const SymKey& k : keys) header = advance_ahdr(header, k);
  return header;
}

OutboundData forward_packet(const SessionState& s, ByteSpan sealed, Rng& rng) {
  LayerResult wrapped = wrap_forward(s.keys.forward, random_iv(rng), sealed);
  OutboundData out;
  out.packet.chdr.type = PacketType::kDataForward;
  out.packet.iv = wrapped.iv;
  out.packet.header = s.ahdr_f;
  out.packet.payload = std::move(wrapped.payload);
  out.next_hop = s.first_hop;
  return out;
}

OutboundData nested_packet(const SessionState& s, const Ahdr& inner, ByteSpan framed, Rng& rng) {
  LayerResult wrapped = wrap_forward(s.keys.forward, random_iv(rng), framed);
  OutboundData out;
  out.packet.chdr.type = PacketType::kDataForward;
  out.packet.chdr.nested = true;
  out.packet.iv = wrapped.iv;
  out.packet.header = create_nested_ahdr(s.keys.forward, s.fwd_fses, inner, rng);
  out.packet.payload = std::move(wrapped.payload);
  out.next_hop = s.first_hop;
  return out;
}

void check_next_hop(const NodeState& node, const RoutingSegment& route) {
  if (!node.is_neighbor(route.next_hop)) {
    throw Error(ErrorCode::kInvalidRoute, "node " + std::to_string(node.node_id) +
                                              " has no link to " +
                                              std::to_string(route.next_hop));
  }
}

}  // namespace

NodeState NodeState::generate(std::uint32_t id, Rng& rng) {
  NodeState n;
  n.node_id = id;
  n.set_sv(rng.key());
  n.dh_secret = rng.scalar();
  n.dh_public = crypto::public_from_secret(n.dh_secret);
  return n;
}

void NodeState::set_sv(const SymKey& key) {
  sv = key;
  sealer_ = std::make_shared<const FsSealer>(key);
}

std::shared_ptr<const FsSealer> NodeState::sealer() const {
  if (sealer_ && sealer_->sv() == sv) return sealer_;
  return std::make_shared<const FsSealer>(sv);
}

bool NodeState::is_neighbor(std::uint32_t id) const {
  return std::find(neighbors.begin(), neighbors.end(), id) != neighbors.end();
}

PendingSetup source_begin_setup(const SessionRequest& request, ExpiryTime now, Rng& rng) {
  if (request.forward.empty() || request.backward.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "both paths need at least one node");
  }
  if (request.forward.size() > kMaxHops || request.backward.size() > kMaxHops) {
    throw Error(ErrorCode::kPathTooLong, "paths are limited to r = 7 nodes");
  }
  const bool allowed =
      request.exp > now && std::ranges::find(kAllowedLifetimes, request.exp.decaseconds -
                                                                    now.decaseconds) !=
                               std::end(kAllowedLifetimes);
  if (!allowed) {
    throw Error(ErrorCode::kInvalidExpiry,
                "expiry must be 10 s, 30 s, 1 min or 10 min after now");
  }
  check_payload_size(request.payload_size);
  if (request.payload_size < kMinSessionPayload) {
    throw Error(ErrorCode::kInvalidArgument, "payload must hold a 336-byte header block");
  }

  const Scalar x_s = rng.scalar();
  BootstrapInput input;
  input.source_secret = x_s;
  const std::size_t lf = request.forward.size();
  const std::size_t lb = request.backward.size();
  for (std::size_t i = 0; i < lf; ++i) {
    RoutingSegment r;
    r.egress_link = request.forward[i].egress_link;
    if (i + 1 < lf) {
      r.next_hop = request.forward[i + 1].id;
    } else {
      r.next_hop = request.backward.front().id;
      r.flags = RoutingSegment::kDestinationFlag;
    }
    input.forward.push_back({request.forward[i].public_key, r});
  }
  for (std::size_t j = 0; j < lb; ++j) {
    RoutingSegment r;
    r.egress_link = request.backward[j].egress_link;
    r.next_hop = j + 1 < lb ? request.backward[j + 1].id : request.source_id;
    input.backward.push_back({request.backward[j].public_key, r});
  }

  CommonHeader chdr;
  chdr.type = PacketType::kSetupForward;
  chdr.exp = request.exp;
  SphinxHeaders headers = gen_sphx_hdr(input, chdr, rng);

  PendingSetup out;
  SessionState& s = out.session;
  rng.fill(s.handle);
  s.exp = request.exp;
  s.keys = headers.keys;
  s.dest_key = s.keys.forward.back();
  s.payload_size = request.payload_size;
  s.first_hop = request.forward.front().id;
  s.destination_id = request.forward.back().id;
  s.expected_backward_y = headers.backward_final_y;
  s.fs_seed = crypto::hash_to_key("hornet/setup/fs-payload", x_s.bytes);

  SetupPacket& p = out.outbound.packet;
  p.chdr = chdr;
  p.shdr = headers.forward;
  p.payload = gen_sphx_pl_send(s.keys.forward, headers.backward.serialize());
  p.fs_payload = init_fs_payload(s.fs_seed);
  out.outbound.next_hop = s.first_hop;
  return out;
}

SetupStep node_process_setup(const NodeState& node, const SetupPacket& packet, ExpiryTime now) {
  if (!packet.chdr.is_setup()) throw Error(ErrorCode::kUnknownType, "not a setup packet");
  SphinxStep sx = proc_sphx_pkt(packet.shdr, packet.payload, node.dh_secret, packet.chdr);
  if (now >= packet.chdr.exp) {
    throw Error(ErrorCode::kSessionExpired, "setup packet past its expiry");
  }
  const bool forward = packet.chdr.type == PacketType::kSetupForward;
  if (sx.route.is_destination() && !forward) {
    throw Error(ErrorCode::kInvalidRoute, "destination flag on the backward path");
  }
  check_next_hop(node, sx.route);

  SetupStep out;
  out.key = sx.key;
  out.route = sx.route;
  out.at_destination = sx.route.is_destination();
  out.packet.chdr = packet.chdr;
  out.packet.shdr = sx.header;
  out.packet.payload = sx.payload;
  const ForwardingSegment fs = node.sealer()->create(sx.key, sx.route, packet.chdr.exp);
  out.packet.fs_payload = add_fs(sx.key, fs, packet.fs_payload);
  return out;
}

SetupStep dest_turnaround(const NodeState& node, const SetupPacket& packet, ExpiryTime now) {
  SetupStep step = node_process_setup(node, packet, now);
  if (!step.at_destination) {
    throw Error(ErrorCode::kInvalidRoute, "setup packet is not addressed to this node");
  }
  const Bytes shdr_b = unwrap_sphx_pl_send(step.key, step.packet.payload);
  if (shdr_b.size() != kSphinxHeaderSize) {
    throw Error(ErrorCode::kTagMismatch, "Sphinx payload does not hold a reply header");
  }
  SetupPacket p2;
  p2.chdr = packet.chdr;
  p2.chdr.type = PacketType::kSetupBackward;
  p2.shdr = SphinxHeader::parse(shdr_b);
  p2.payload = gen_sphx_pl_recv(step.key, step.packet.fs_payload.bytes);
  p2.fs_payload = init_fs_payload(step.key);
  step.packet = p2;
  return step;
}

bool source_matches_setup(const SessionState& pending, const SetupPacket& packet) {
  return !pending.active && packet.chdr.type == PacketType::kSetupBackward &&
         packet.shdr.y == pending.expected_backward_y;
}

void source_complete_setup(SessionState& pending, const SetupPacket& packet, Rng& rng) {
  if (!source_matches_setup(pending, packet)) {
    throw Error(ErrorCode::kUnknownSession, "setup reply does not belong to this session");
  }
  const Bytes pf = unwrap_sphx_pl_recv(pending.keys.backward, pending.dest_key, packet.payload);
  if (pf.size() != kFsPayloadSize) {
    throw Error(ErrorCode::kTagMismatch, "reply does not carry an FS payload");
  }
  FsPayload forward_payload;
  std::memcpy(forward_payload.bytes.data(), pf.data(), kFsPayloadSize);

  SessionState s = pending;
  s.fwd_fses = retrieve_fses(forward_payload, s.fs_seed, s.keys.forward);
  s.bwd_fses = retrieve_fses(packet.fs_payload, s.dest_key, s.keys.backward);
  s.ahdr_f = create_ahdr(s.keys.forward, s.fwd_fses, rng);
  s.ahdr_b = create_ahdr(s.keys.backward, s.bwd_fses, rng);
  s.expected_backward_header = final_header(s.ahdr_b, s.keys.backward);
  s.active = true;
  pending = std::move(s);
}

OutboundData source_control_packet(SessionState& session, ExpiryTime now, Rng& rng) {
  require_active(session, now);
  PlaintextBlock block{session.send_seq, true, Bytes(session.ahdr_b.bytes.begin(),
                                                     session.ahdr_b.bytes.end())};
  const Bytes sealed =
      seal_block(block_mac_key(session.dest_key), FlowDirection::kForward, block,
                 session.payload_size);
  ++session.send_seq;
  return forward_packet(session, sealed, rng);
}

OutboundData source_send_data(SessionState& session, ByteSpan app_data, ExpiryTime now,
                              Rng& rng) {
  require_active(session, now);
  PlaintextBlock block{session.send_seq, false, Bytes(app_data.begin(), app_data.end())};
  const Bytes sealed =
      seal_block(block_mac_key(session.dest_key), FlowDirection::kForward, block,
                 session.payload_size);
  ++session.send_seq;
  return forward_packet(session, sealed, rng);
}

bool source_matches_data(const SessionState& session, const DataPacket& packet) {
  if (!session.active || packet.nested() || packet.chdr.type != PacketType::kDataBackward) {
    return false;
  }
  return std::get<Ahdr>(packet.header) == session.expected_backward_header;
}

PlaintextBlock source_receive_data(SessionState& session, const DataPacket& packet) {
  const Bytes plain =
      unwrap_backward(session.keys.backward, session.dest_key, packet.iv, packet.payload);
  PlaintextBlock block =
      open_block(block_mac_key(session.dest_key), FlowDirection::kBackward, plain);
  session.recv_window.accept(block.seq);
  return block;
}

DataStep node_process_data(const NodeState& node, const DataPacket& packet, ExpiryTime now) {
  if (packet.chdr.is_setup()) throw Error(ErrorCode::kUnknownType, "not a data packet");
  const std::shared_ptr<const FsSealer> sealer = node.sealer();
  DataStep out;
  out.packet.chdr = packet.chdr;
  out.packet.iv = packet.iv;
  out.packet.payload = packet.payload;

  if (packet.nested()) {
    if (packet.chdr.type != PacketType::kDataForward) {
      throw Error(ErrorCode::kUnknownType, "nested headers only travel forward");
    }
    NestedAhdrStep st = proc_nested_ahdr(*sealer, std::get<NestedAhdr>(packet.header), now);
    remove_layer_inplace(st.key, out.packet.iv, out.packet.payload);
    if (!st.route.is_destination()) {
      check_next_hop(node, st.route);
      out.packet.header = st.next;
      out.route = st.route;
      out.key = st.key;
      return out;
    }
    // Rendezvous point: the inner header starts with this node's own FS
    // from the peer's session and continues along the peer's backward path.
    AhdrStep in = proc_ahdr(*sealer, inner_ahdr(st.next), now);
    check_next_hop(node, in.route);
    add_layer_inplace(in.key, out.packet.iv, out.packet.payload);
    out.packet.chdr.type = PacketType::kDataBackward;
    out.packet.chdr.nested = false;
    out.packet.header = in.next;
    out.route = in.route;
    out.key = in.key;
    out.spliced = true;
    return out;
  }

  AhdrStep st = proc_ahdr(*sealer, std::get<Ahdr>(packet.header), now);
  out.route = st.route;
  out.key = st.key;
  if (packet.chdr.type == PacketType::kDataForward) {
    remove_layer_inplace(st.key, out.packet.iv, out.packet.payload);
    if (st.route.is_destination()) {
      out.packet.header = st.next;
      out.delivered = true;
      return out;
    }
  } else {
    add_layer_inplace(st.key, out.packet.iv, out.packet.payload);
  }
  check_next_hop(node, st.route);
  out.packet.header = st.next;
  return out;
}

std::optional<Bytes> DestinationHost::receive(const DataStep& step) {
  if (!step.delivered) throw Error(ErrorCode::kInvalidArgument, "packet was not delivered here");
  PlaintextBlock block =
      open_block(block_mac_key(step.key), FlowDirection::kForward, step.packet.payload);
  if (block.control) {
    if (block.data.size() != kAhdrSize) {
      throw Error(ErrorCode::kE2eMacMismatch, "control block does not hold a header");
    }
    auto it = sessions_.find(step.key);
    Session fresh;
    Session& s = it != sessions_.end() ? it->second : fresh;
    s.window.accept(block.seq);
    std::memcpy(s.ahdr_b.bytes.data(), block.data.data(), kAhdrSize);
    s.first_backward_hop = step.route.next_hop;
    s.payload_size = step.packet.payload.size();
    if (it == sessions_.end()) sessions_.emplace(step.key, std::move(fresh));
    return std::nullopt;
  }
  auto it = sessions_.find(step.key);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kUnknownSession, "data block before the session's header block");
  }
  it->second.window.accept(block.seq);
  return std::move(block.data);
}

const DestinationHost::Session* DestinationHost::find(const SymKey& dest_key) const {
  auto it = sessions_.find(dest_key);
  return it == sessions_.end() ? nullptr : &it->second;
}

OutboundData DestinationHost::reply(const SymKey& dest_key, ByteSpan app_data, Rng& rng) {
  auto it = sessions_.find(dest_key);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "no backward header");
  Session& s = it->second;
  PlaintextBlock block{s.send_seq, false, Bytes(app_data.begin(), app_data.end())};
  Bytes sealed = seal_block(block_mac_key(dest_key), FlowDirection::kBackward, block,
                            s.payload_size);
  ++s.send_seq;
  OutboundData out;
  out.packet.chdr.type = PacketType::kDataBackward;
  out.packet.iv = random_iv(rng);
  add_layer_inplace(dest_key, out.packet.iv, sealed);
  out.packet.header = s.ahdr_b;
  out.packet.payload = std::move(sealed);
  out.next_hop = s.first_backward_hop;
  return out;
}

// ---------------------------------------------------------------------------
// Rendezvous

namespace {

constexpr std::size_t kConnOffset = 0;
constexpr std::size_t kEphemeralOffset = 16;
constexpr std::size_t kControlBlockOffset = kEphemeralOffset + kGroupElementSize;
constexpr std::size_t kNonceOffset = 16;
constexpr std::size_t kDataBlockOffset = 32;

SymKey e2e_key(const GroupElement& shared, const GroupElement& ephemeral_public) {
  Bytes in(shared.bytes.begin(), shared.bytes.end());
  append(in, ephemeral_public.bytes);
  return crypto::hash_to_key("hornet/rendezvous/e2e", in);
}

ConnectionId connection_id(const SymKey& e2e) {
  return crypto::hash_to_key("hornet/rendezvous/connection", e2e.bytes).bytes;
}

Bytes frame_control(const SymKey& e2e, const GroupElement& ephemeral_public, std::uint64_t seq,
                    const Ahdr& reply_header, std::size_t payload_size) {
  Bytes out(payload_size, 0);
  std::memcpy(out.data() + kEphemeralOffset, ephemeral_public.bytes.data(), kGroupElementSize);
  PlaintextBlock block{seq, true, Bytes(reply_header.bytes.begin(), reply_header.bytes.end())};
  const Bytes sealed = seal_block(crypto::derive_subkey(e2e, SubkeyLabel::kMac),
                                  FlowDirection::kForward, block,
                                  payload_size - kControlBlockOffset);
  std::memcpy(out.data() + kControlBlockOffset, sealed.data(), sealed.size());
  return out;
}

Bytes frame_data(const SymKey& e2e, const ConnectionId& conn, FlowDirection dir,
                 std::uint64_t seq, ByteSpan data, std::size_t payload_size, Rng& rng) {
  Bytes out(payload_size, 0);
  std::memcpy(out.data() + kConnOffset, conn.data(), conn.size());
  rng.fill(MutableByteSpan(out.data() + kNonceOffset, kIvSize));
  PlaintextBlock block{seq, false, Bytes(data.begin(), data.end())};
  Bytes sealed = seal_block(crypto::derive_subkey(e2e, SubkeyLabel::kMac), dir, block,
                            payload_size - kDataBlockOffset);
  crypto::stream_xcrypt_inplace(crypto::derive_subkey(e2e, SubkeyLabel::kEnc),
                                ByteSpan(out.data() + kNonceOffset, kIvSize), sealed);
  std::memcpy(out.data() + kDataBlockOffset, sealed.data(), sealed.size());
  return out;
}

PlaintextBlock open_data(const SymKey& e2e, FlowDirection dir, ByteSpan framed) {
  Bytes sealed(framed.begin() + kDataBlockOffset, framed.end());
  crypto::stream_xcrypt_inplace(crypto::derive_subkey(e2e, SubkeyLabel::kEnc),
                                framed.subspan(kNonceOffset, kIvSize), sealed);
  PlaintextBlock block = open_block(crypto::derive_subkey(e2e, SubkeyLabel::kMac), dir, sealed);
  if (block.control) throw Error(ErrorCode::kE2eMacMismatch, "unexpected control block");
  return block;
}

bool is_control_frame(ByteSpan framed) {
  return std::all_of(framed.begin(), framed.begin() + 16, [](std::uint8_t b) { return b == 0; });
}

void check_rendezvous_session(const SessionState& s) {
  if (!s.active) throw Error(ErrorCode::kInvalidArgument, "session setup not completed");
  if (s.payload_size < kRendezvousMinPayload) {
    throw Error(ErrorCode::kInvalidArgument, "rendezvous needs payloads of at least 416 bytes");
  }
}

std::vector<SymKey> reply_keys(const SessionState& s) {
  std::vector<SymKey> keys{s.dest_key};
  keys.insert(keys.end(), s.keys.backward.begin(), s.keys.backward.end());
  return keys;
}

bool matches_inbound(const SessionState& s, const Ahdr& inbound, const DataPacket& packet) {
  return s.active && !packet.nested() && packet.chdr.type == PacketType::kDataBackward &&
         std::get<Ahdr>(packet.header) == inbound;
}

}  // namespace

Ahdr reply_header_via_destination(const SessionState& session, Rng& rng) {
  if (session.keys.backward.size() + 1 > kMaxHops) {
    throw Error(ErrorCode::kPathTooLong, "reply header would exceed r = 7 hops");
  }
  std::vector<ForwardingSegment> fses{session.fwd_fses.back()};
  fses.insert(fses.end(), session.bwd_fses.begin(), session.bwd_fses.end());
  return create_ahdr(reply_keys(session), fses, rng);
}

RendezvousService::RendezvousService(SessionState session, std::string label, Rng& rng)
    : session_(std::move(session)) {
  check_rendezvous_session(session_);
  service_secret_ = rng.scalar();
  record_.label = std::move(label);
  record_.rp_id = session_.destination_id;
  record_.ahdr_rd = reply_header_via_destination(session_, rng);
  record_.exp = session_.exp;
  record_.service_key = crypto::public_from_secret(service_secret_);
  inbound_header_ = final_header(record_.ahdr_rd, reply_keys(session_));
}

bool RendezvousService::matches(const DataPacket& packet) const {
  return matches_inbound(session_, inbound_header_, packet);
}

RendezvousService::Received RendezvousService::receive(const DataPacket& packet) {
  const Bytes framed =
      unwrap_backward(session_.keys.backward, session_.dest_key, packet.iv, packet.payload);
  if (framed.size() < kRendezvousMinPayload) {
    throw Error(ErrorCode::kE2eMacMismatch, "rendezvous payload too short");
  }
  Received out;
  if (is_control_frame(framed)) {
    GroupElement eph;
    std::memcpy(eph.bytes.data(), framed.data() + kEphemeralOffset, kGroupElementSize);
    const SymKey e2e = e2e_key(crypto::dh(service_secret_, eph), eph);
    PlaintextBlock block = open_block(crypto::derive_subkey(e2e, SubkeyLabel::kMac),
                                      FlowDirection::kForward,
                                      ByteSpan(framed).subspan(kControlBlockOffset));
    if (!block.control || block.data.size() != kAhdrSize) {
      throw Error(ErrorCode::kE2eMacMismatch, "malformed connection request");
    }
    out.conn = connection_id(e2e);
    auto it = peers_.find(out.conn);
    Peer fresh;
    Peer& peer = it != peers_.end() ? it->second : fresh;
    peer.window.accept(block.seq);
    peer.e2e = e2e;
    std::memcpy(peer.ahdr_rs.bytes.data(), block.data.data(), kAhdrSize);
    if (it == peers_.end()) peers_.emplace(out.conn, std::move(fresh));
    return out;
  }
  std::memcpy(out.conn.data(), framed.data() + kConnOffset, out.conn.size());
  auto it = peers_.find(out.conn);
  if (it == peers_.end()) throw Error(ErrorCode::kUnknownSession, "unknown connection id");
  PlaintextBlock block = open_data(it->second.e2e, FlowDirection::kForward, framed);
  it->second.window.accept(block.seq);
  out.data = std::move(block.data);
  return out;
}

OutboundData RendezvousService::send(const ConnectionId& conn, ByteSpan app_data, ExpiryTime now,
                                     Rng& rng) {
  require_active(session_, now);
  auto it = peers_.find(conn);
  if (it == peers_.end()) throw Error(ErrorCode::kUnknownSession, "unknown connection id");
  Peer& peer = it->second;
  const Bytes framed = frame_data(peer.e2e, conn, FlowDirection::kBackward, peer.send_seq,
                                  app_data, session_.payload_size, rng);
  ++peer.send_seq;
  return nested_packet(session_, peer.ahdr_rs, framed, rng);
}

RendezvousClient::RendezvousClient(SessionState session, const RendezvousRecord& record,
                                   ExpiryTime now, Rng& rng)
    : session_(std::move(session)), record_(record) {
  check_rendezvous_session(session_);
  if (now >= record_.exp) throw Error(ErrorCode::kSessionExpired, "rendezvous record expired");
  if (session_.destination_id != record_.rp_id) {
    throw Error(ErrorCode::kInvalidArgument, "session does not end at the rendezvous point");
  }
  ephemeral_ = rng.scalar();
  const GroupElement eph_public = crypto::public_from_secret(ephemeral_);
  e2e_ = e2e_key(crypto::dh(ephemeral_, record_.service_key), eph_public);
  conn_ = connection_id(e2e_);
  ahdr_rs_ = reply_header_via_destination(session_, rng);
  inbound_header_ = final_header(ahdr_rs_, reply_keys(session_));
}

bool RendezvousClient::matches(const DataPacket& packet) const {
  return matches_inbound(session_, inbound_header_, packet);
}

OutboundData RendezvousClient::connect(ExpiryTime now, Rng& rng) {
  require_active(session_, now);
  if (now >= record_.exp) throw Error(ErrorCode::kSessionExpired, "rendezvous record expired");
  const Bytes framed = frame_control(e2e_, crypto::public_from_secret(ephemeral_), send_seq_,
                                     ahdr_rs_, session_.payload_size);
  ++send_seq_;
  return nested_packet(session_, record_.ahdr_rd, framed, rng);
}

OutboundData RendezvousClient::send(ByteSpan app_data, ExpiryTime now, Rng& rng) {
  require_active(session_, now);
  const Bytes framed = frame_data(e2e_, conn_, FlowDirection::kForward, send_seq_, app_data,
                                  session_.payload_size, rng);
  ++send_seq_;
  return nested_packet(session_, record_.ahdr_rd, framed, rng);
}

Bytes RendezvousClient::receive(const DataPacket& packet) {
  const Bytes framed =
      unwrap_backward(session_.keys.backward, session_.dest_key, packet.iv, packet.payload);
  if (!std::equal(conn_.begin(), conn_.end(), framed.begin())) {
    throw Error(ErrorCode::kE2eMacMismatch, "connection id mismatch");
  }
  PlaintextBlock block = open_data(e2e_, FlowDirection::kBackward, framed);
  window_.accept(block.seq);
  return std::move(block.data);
}

}  // namespace hornet
