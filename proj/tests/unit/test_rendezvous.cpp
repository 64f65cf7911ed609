#include <gtest/gtest.h>

#include <map>

#include "hornet/error.hpp"
#include "hornet/protocol.hpp"

namespace hornet {
namespace {

// H(1) - X(2) - R(3) - Y(4) - C(5): H hosts the service, C is the client,
// R is the rendezvous point.
constexpr std::uint32_t kH = 1, kX = 2, kR = 3, kY = 4, kC = 5;

class RendezvousTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (std::uint32_t id = kH; id <= kC; ++id) nodes[id] = NodeState::generate(id, rng);
    for (std::uint32_t id = kH; id < kC; ++id) {
      nodes[id].neighbors.push_back(id + 1);
      nodes[id + 1].neighbors.push_back(id);
    }
  }

  SessionState establish(std::uint32_t source, std::uint32_t via) {
    SessionRequest req;
    req.source_id = source;
    req.forward = {{via, nodes[via].dh_public, 0}, {kR, nodes[kR].dh_public, 0}};
    req.backward = {{via, nodes[via].dh_public, 0}};
    req.exp = {now.decaseconds + 60};
    req.payload_size = 512;
    PendingSetup p = source_begin_setup(req, now, rng);
    SetupPacket pkt = p.outbound.packet;
    std::uint32_t hop = p.outbound.next_hop;
    while (hop != source) {
      SetupStep st = node_process_setup(nodes[hop], pkt, now);
      if (st.at_destination) st = dest_turnaround(nodes[hop], pkt, now);
      pkt = st.packet;
      hop = st.route.next_hop;
    }
    source_complete_setup(p.session, pkt, rng);
    return p.session;
  }

  // Forwards until the packet reaches an end host; records nodes visited.
  DataPacket route(const OutboundData& out, std::uint32_t& arrived_at) {
    DataPacket d = out.packet;
    std::uint32_t hop = out.next_hop;
    while (hop != kH && hop != kC) {
      visited.push_back(hop);
      const DataStep st = node_process_data(nodes[hop], d, now);
      EXPECT_FALSE(st.delivered) << "rendezvous traffic delivered at " << hop;
      d = st.packet;
      hop = st.route.next_hop;
    }
    arrived_at = hop;
    return d;
  }

  Rng rng{101};
  ExpiryTime now{100000};
  std::map<std::uint32_t, NodeState> nodes;
  std::vector<std::uint32_t> visited;
};

TEST_F(RendezvousTest, ConnectExchangeAndReply) {
  RendezvousService service(establish(kH, kX), "svc", rng);
  EXPECT_EQ(service.record().rp_id, kR);
  RendezvousClient client(establish(kC, kY), service.record(), now, rng);

  std::uint32_t at = 0;
  const DataPacket hello = route(client.connect(now, rng), at);
  ASSERT_EQ(at, kH);
  ASSERT_TRUE(service.matches(hello));
  const auto req = service.receive(hello);
  EXPECT_FALSE(req.data.has_value());
  EXPECT_EQ(req.conn, client.connection());
  EXPECT_EQ(service.connection_count(), 1u);

  for (int i = 0; i < 5; ++i) {
    const Bytes msg = rng.bytes(10 + 40 * i);
    const DataPacket to_service = route(client.send(msg, now, rng), at);
    ASSERT_EQ(at, kH);
    const auto got = service.receive(to_service);
    ASSERT_TRUE(got.data.has_value());
    EXPECT_EQ(*got.data, msg);

    const DataPacket to_client = route(service.send(got.conn, msg, now, rng), at);
    ASSERT_EQ(at, kC);
    ASSERT_TRUE(client.matches(to_client));
    EXPECT_EQ(client.receive(to_client), msg);
  }
  EXPECT_NE(std::find(visited.begin(), visited.end(), kR), visited.end());
}

TEST_F(RendezvousTest, ReplaysAndTamperingRejected) {
  RendezvousService service(establish(kH, kX), "svc", rng);
  RendezvousClient client(establish(kC, kY), service.record(), now, rng);
  std::uint32_t at = 0;
  service.receive(route(client.connect(now, rng), at));

  const DataPacket p = route(client.send(Bytes{1, 2, 3}, now, rng), at);
  EXPECT_EQ(*service.receive(p).data, (Bytes{1, 2, 3}));
  try {
    service.receive(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayDetected);
  }
  DataPacket t = route(client.send(Bytes{4}, now, rng), at);
  t.payload[100] ^= 1;
  EXPECT_THROW(service.receive(t), Error);
}

TEST_F(RendezvousTest, ExpiredRecordRefused) {
  RendezvousService service(establish(kH, kX), "svc", rng);
  const ExpiryTime late = service.record().exp;
  try {
    RendezvousClient client(establish(kC, kY), service.record(), late, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionExpired);
  }
}

}  // namespace
}  // namespace hornet
