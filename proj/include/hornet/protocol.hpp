#pragma once

// Session setup, data transmission, and rendezvous on top of the header
// and payload formats. Intermediate nodes are pure functions of
// (NodeState, packet, now); endpoints keep whatever state they need.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hornet/replay_window.hpp"
#include "hornet/wire.hpp"

namespace hornet {

struct NodeState {
  std::uint32_t node_id = 0;
  SymKey sv;
  Scalar dh_secret;
  GroupElement dh_public;
  // Adjacent node ids; a routing segment naming anything else is invalid.
  std::vector<std::uint32_t> neighbors;

  static NodeState generate(std::uint32_t id, Rng& rng);
  bool is_neighbor(std::uint32_t id) const;

  // Replaces sv and rebuilds the cached sealing schedule.
  void set_sv(const SymKey& key);
  // Sealer for the current sv; built on the spot if sv was assigned directly.
  std::shared_ptr<const FsSealer> sealer() const;

 private:
  std::shared_ptr<const FsSealer> sealer_;
};

// One hop of a path as the source sees it. `egress_link` is the link this
// node uses towards the next hop.
struct PathNode {
  std::uint32_t id = 0;
  GroupElement public_key;
  std::uint16_t egress_link = 0;
};

// Session lifetimes allowed on the wire, in decaseconds: 10 s, 30 s, 1 min,
// 10 min.
inline constexpr std::uint32_t kAllowedLifetimes[] = {1, 3, 6, 60};

struct SessionRequest {
  std::uint32_t source_id = 0;
  std::vector<PathNode> forward;   // ends with the destination
  std::vector<PathNode> backward;  // the last node hands packets to the source
  ExpiryTime exp;
  std::size_t payload_size = kDefaultPayloadSize;
};

using SessionHandle = ByteArray<16>;

struct SessionState {
  SessionHandle handle{};
  ExpiryTime exp;
  SetupKeys keys;
  std::vector<ForwardingSegment> fwd_fses;
  std::vector<ForwardingSegment> bwd_fses;
  Ahdr ahdr_f;
  Ahdr ahdr_b;
  SymKey dest_key;
  std::uint64_t send_seq = 0;
  ReplayWindow recv_window;
  std::size_t payload_size = kDefaultPayloadSize;
  std::uint32_t first_hop = 0;
  std::uint32_t destination_id = 0;
  bool active = false;

  // Setup bookkeeping.
  GroupElement expected_backward_y;
  SymKey fs_seed;
  // Header bytes that backward data packets carry on their last link.
  Ahdr expected_backward_header;
};

struct OutboundSetup {
  SetupPacket packet;
  std::uint32_t next_hop = 0;
};

struct OutboundData {
  DataPacket packet;
  std::uint32_t next_hop = 0;
};

// Errors: kInvalidExpiry (exp - now not one of kAllowedLifetimes),
// kPathTooLong, kInvalidArgument (empty path, bad payload size).
struct PendingSetup {
  SessionState session;
  OutboundSetup outbound;
};
PendingSetup source_begin_setup(const SessionRequest& request, ExpiryTime now, Rng& rng);

struct SetupStep {
  SetupPacket packet;
  RoutingSegment route;
  SymKey key;
  // The routing segment carries the destination flag: the caller must hand
  // the original packet to dest_turnaround instead of forwarding.
  bool at_destination = false;
};

// Errors: kMacMismatch, kInvalidElement, kSessionExpired, kInvalidRoute,
// kUnknownType (not a setup packet).
SetupStep node_process_setup(const NodeState& node, const SetupPacket& packet, ExpiryTime now);

// Destination side: processes P1 like any hop, then emits P2 towards the
// first backward node. Errors as node_process_setup plus kTagMismatch.
SetupStep dest_turnaround(const NodeState& node, const SetupPacket& packet, ExpiryTime now);

// True when `packet` is the P2 answering `pending`.
bool source_matches_setup(const SessionState& pending, const SetupPacket& packet);

// Errors: kUnknownSession, kTagMismatch, kMacMismatch (with layer). On error
// the session is left untouched.
void source_complete_setup(SessionState& pending, const SetupPacket& packet, Rng& rng);

// Control packet carrying ahdr_b; the first packet of every session and the
// retransmission when no backward traffic has arrived.
OutboundData source_control_packet(SessionState& session, ExpiryTime now, Rng& rng);

// Errors: kSessionExpired, kPayloadTooLarge, kInvalidArgument (inactive).
OutboundData source_send_data(SessionState& session, ByteSpan app_data, ExpiryTime now, Rng& rng);

bool source_matches_data(const SessionState& session, const DataPacket& packet);

// Errors: kE2eMacMismatch, kReplayDetected.
PlaintextBlock source_receive_data(SessionState& session, const DataPacket& packet);

struct DataStep {
  DataPacket packet;
  RoutingSegment route;
  SymKey key;
  // Forward packet whose header names this node as destination; `packet`
  // then holds the plaintext block in its payload.
  bool delivered = false;
  // A nested header ended here and the packet was spliced onto the inner
  // header.
  bool spliced = false;
};

// Symmetric-key operations only. Errors: kMacMismatch, kPadCheckFailed,
// kSessionExpired, kInvalidRoute.
DataStep node_process_data(const NodeState& node, const DataPacket& packet, ExpiryTime now);

// Destination endpoint table, keyed by s_D.
class DestinationHost {
 public:
  struct Session {
    Ahdr ahdr_b;
    std::uint32_t first_backward_hop = 0;
    std::uint64_t send_seq = 0;
    ReplayWindow window;
    std::size_t payload_size = 0;
  };

  // Consumes a delivered step. Returns application bytes for data blocks and
  // nullopt for control blocks (which (re)install ahdr_b). Errors:
  // kE2eMacMismatch, kReplayDetected, kUnknownSession (data before any
  // control block).
  std::optional<Bytes> receive(const DataStep& step);

  OutboundData reply(const SymKey& dest_key, ByteSpan app_data, Rng& rng);

  std::size_t session_count() const { return sessions_.size(); }
  const Session* find(const SymKey& dest_key) const;

 private:
  std::map<SymKey, Session> sessions_;
};

// Rendezvous: both endpoints hold an ordinary session that ends at the
// rendezvous point R, and each publishes or sends a header that starts at R
// and leads back to itself. Traffic travels in nested packets: the outer
// header reaches R, the inner one carries on to the peer.

struct RendezvousRecord {
  std::string label;
  std::uint32_t rp_id = 0;
  Ahdr ahdr_rd;
  ExpiryTime exp;
  GroupElement service_key;
};

// Onion payload framing between the endpoints:
//   control: 0^16 || g^e(32) || sealed block(P - 48) carrying AHDR_{R->S}
//   data:    conn_id(16) || nonce(16) || ENC(e2e, nonce, sealed block(P - 32))
inline constexpr std::size_t kRendezvousMinPayload = 416;
using ConnectionId = ByteArray<16>;

// Header starting at the session's destination (the rendezvous point) and
// ending with the backward path: keys {s_R} + backward, FSes {FS_R} +
// backward. Needs l^b <= r - 1.
Ahdr reply_header_via_destination(const SessionState& session, Rng& rng);

class RendezvousService {
 public:
  // `session` must be active and end at the rendezvous point.
  RendezvousService(SessionState session, std::string label, Rng& rng);

  const RendezvousRecord& record() const { return record_; }
  SessionState& session() { return session_; }
  bool matches(const DataPacket& packet) const;

  struct Received {
    ConnectionId conn;
    std::optional<Bytes> data;  // nullopt for a connection request
  };
  // Errors: kE2eMacMismatch, kReplayDetected, kUnknownSession.
  Received receive(const DataPacket& packet);
  OutboundData send(const ConnectionId& conn, ByteSpan app_data, ExpiryTime now, Rng& rng);
  std::size_t connection_count() const { return peers_.size(); }

 private:
  struct Peer {
    SymKey e2e;
    Ahdr ahdr_rs;
    std::uint64_t send_seq = 0;
    ReplayWindow window;
  };

  SessionState session_;
  Scalar service_secret_;
  RendezvousRecord record_;
  Ahdr inbound_header_;
  std::map<ConnectionId, Peer> peers_;
};

class RendezvousClient {
 public:
  // `session` must be active and end at record.rp_id. Errors:
  // kSessionExpired (record expired at `now`), kInvalidArgument.
  RendezvousClient(SessionState session, const RendezvousRecord& record, ExpiryTime now,
                   Rng& rng);

  SessionState& session() { return session_; }
  const ConnectionId& connection() const { return conn_; }
  bool matches(const DataPacket& packet) const;

  // Connection request carrying AHDR_{R->S} and the client's ephemeral key.
  OutboundData connect(ExpiryTime now, Rng& rng);
  OutboundData send(ByteSpan app_data, ExpiryTime now, Rng& rng);
  // Errors: kE2eMacMismatch, kReplayDetected.
  Bytes receive(const DataPacket& packet);

 private:
  SessionState session_;
  RendezvousRecord record_;
  Scalar ephemeral_;
  SymKey e2e_;
  ConnectionId conn_{};
  Ahdr ahdr_rs_;
  Ahdr inbound_header_;
  std::uint64_t send_seq_ = 0;
  ReplayWindow window_;
};

}  // namespace hornet
