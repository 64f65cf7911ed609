#include <gtest/gtest.h>

#include "harness.hpp"
#include "hornet/error.hpp"

namespace hornet {
namespace {

using testing::kSource;
using testing::LineNet;

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kValidation;
}

TEST(Session, EstablishAndEcho) {
  LineNet net(3, 2, 81);
  SessionState s = net.establish();
  EXPECT_TRUE(s.active);
  EXPECT_EQ(s.keys.forward.size(), 3u);
  EXPECT_EQ(s.keys.backward.size(), 2u);
  EXPECT_FALSE(net.deliver(source_control_packet(s, net.now, net.rng), s).has_value());
  for (int i = 0; i < 5; ++i) {
    const Bytes msg = net.rng.bytes(1 + i * 50);
    EXPECT_EQ(net.deliver(source_send_data(s, msg, net.now, net.rng), s), msg);
    EXPECT_EQ(net.deliver(net.destination.reply(s.dest_key, msg, net.rng), s), msg);
  }
  EXPECT_EQ(net.destination.session_count(), 1u);
}

TEST(Session, PacketsHaveFixedLengths) {
  LineNet net(2, 2, 82);
  net.tracing = true;
  SessionState s = net.establish(60, 384);
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  net.deliver(source_send_data(s, Bytes{1}, net.now, net.rng), s);
  net.deliver(net.destination.reply(s.dest_key, Bytes(300, 2), net.rng), s);
  std::size_t setup = 0;
  for (const auto& c : net.wire) {
    if (c.bytes[0] <= 2) {
      EXPECT_EQ(c.bytes.size(), kSetupPacketSize);
      ++setup;
    } else {
      EXPECT_EQ(c.bytes.size(), kDataHeaderSize + 384);
    }
  }
  EXPECT_EQ(setup, 5u);
}

TEST(Session, DataPathUsesNoGroupOperations) {
  LineNet net(7, 7, 83);
  SessionState s = net.establish();
  const auto before = crypto::counters().dh_calls.load();
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  for (int i = 0; i < 20; ++i) {
    net.deliver(source_send_data(s, Bytes{3}, net.now, net.rng), s);
    net.deliver(net.destination.reply(s.dest_key, Bytes{4}, net.rng), s);
  }
  EXPECT_EQ(crypto::counters().dh_calls.load(), before);
}

TEST(SetupErrors, LifetimeMustBeAllowed) {
  LineNet net(2, 1, 84);
  EXPECT_EQ(error_of([&] { source_begin_setup(net.request(7), net.now, net.rng); }),
            ErrorCode::kInvalidExpiry);
  SessionRequest too_long = net.request();
  for (int i = 0; i < 6; ++i) too_long.forward.push_back(too_long.forward[0]);
  EXPECT_EQ(error_of([&] { source_begin_setup(too_long, net.now, net.rng); }),
            ErrorCode::kPathTooLong);
  SessionRequest empty = net.request();
  empty.forward.clear();
  EXPECT_EQ(error_of([&] { source_begin_setup(empty, net.now, net.rng); }),
            ErrorCode::kInvalidArgument);
}

TEST(SetupErrors, ExpiredAtNode) {
  LineNet net(2, 1, 85);
  const PendingSetup p = source_begin_setup(net.request(1), net.now, net.rng);
  const ExpiryTime exp = p.session.exp;
  EXPECT_NO_THROW(node_process_setup(net.nodes.at(1), p.outbound.packet, {exp.decaseconds - 1}));
  EXPECT_EQ(error_of([&] { node_process_setup(net.nodes.at(1), p.outbound.packet, exp); }),
            ErrorCode::kSessionExpired);
}

TEST(SetupErrors, RouteToNonNeighbour) {
  LineNet net(3, 1, 86);
  net.nodes.at(1).neighbors = {kSource};
  const PendingSetup p = source_begin_setup(net.request(), net.now, net.rng);
  EXPECT_EQ(error_of([&] { node_process_setup(net.nodes.at(1), p.outbound.packet, net.now); }),
            ErrorCode::kInvalidRoute);
}

TEST(SetupErrors, TamperedFsPayloadNamesLayerAndLeavesSessionUntouched) {
  LineNet net(3, 3, 87);
  PendingSetup p = source_begin_setup(net.request(), net.now, net.rng);
  SetupPacket p2 = net.run_setup(p.outbound);
  ASSERT_TRUE(source_matches_setup(p.session, p2));
  // P2 carries the backward FS payload; byte 0 is the MAC slot written by
  // the last backward node.
  p2.fs_payload.bytes[0] ^= 1;
  try {
    source_complete_setup(p.session, p2, net.rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMacMismatch);
    ASSERT_TRUE(e.layer());
    EXPECT_EQ(*e.layer(), 2);
  }
  EXPECT_FALSE(p.session.active);
}

TEST(SetupErrors, SetupHeaderFlipStopsAtNextNode) {
  LineNet net(3, 2, 88);
  const PendingSetup p = source_begin_setup(net.request(), net.now, net.rng);
  SetupPacket t = p.outbound.packet;
  t.shdr.beta[5] ^= 0x40;
  EXPECT_EQ(error_of([&] { node_process_setup(net.nodes.at(1), t, net.now); }),
            ErrorCode::kMacMismatch);
  SetupPacket c = p.outbound.packet;
  c.chdr.exp.decaseconds ^= 1;
  EXPECT_THROW(node_process_setup(net.nodes.at(1), c, net.now), Error);
}

TEST(DataErrors, HeaderFlipDroppedByNextNode) {
  LineNet net(4, 2, 89);
  SessionState s = net.establish();
  const OutboundData out = source_send_data(s, Bytes{1, 2}, net.now, net.rng);
  for (std::size_t byte = 0; byte < kAhdrSize; byte += 13) {
    DataPacket d = out.packet;
    std::get<Ahdr>(d.header).bytes[byte] ^= 0x02;
    EXPECT_THROW(node_process_data(net.nodes.at(1), d, net.now), Error) << byte;
  }
}

TEST(DataErrors, PayloadFlipDetectedEndToEnd) {
  LineNet net(3, 1, 90);
  SessionState s = net.establish();
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  OutboundData out = source_send_data(s, Bytes{9, 9}, net.now, net.rng);
  out.packet.payload[40] ^= 0x80;
  EXPECT_EQ(error_of([&] { net.deliver(out, s); }), ErrorCode::kE2eMacMismatch);
  OutboundData iv_flip = source_send_data(s, Bytes{9, 9}, net.now, net.rng);
  iv_flip.packet.iv.bytes[3] ^= 1;
  EXPECT_EQ(error_of([&] { net.deliver(iv_flip, s); }), ErrorCode::kE2eMacMismatch);
}

TEST(DataErrors, ReplayDetectedAtBothEnds) {
  LineNet net(2, 2, 91);
  SessionState s = net.establish();
  net.deliver(source_control_packet(s, net.now, net.rng), s);
  const OutboundData out = source_send_data(s, Bytes{5}, net.now, net.rng);
  EXPECT_EQ(net.deliver(out, s), Bytes{5});
  EXPECT_EQ(error_of([&] { net.deliver(out, s); }), ErrorCode::kReplayDetected);
  const OutboundData back = net.destination.reply(s.dest_key, Bytes{6}, net.rng);
  EXPECT_EQ(net.deliver(back, s), Bytes{6});
  EXPECT_EQ(error_of([&] { net.deliver(back, s); }), ErrorCode::kReplayDetected);
}

TEST(DataErrors, ExpiryAtEveryNode) {
  LineNet net(3, 3, 92);
  SessionState s = net.establish(1);
  const OutboundData out = source_send_data(s, Bytes{1}, net.now, net.rng);
  DataPacket d = out.packet;
  std::uint32_t hop = out.next_hop;
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(error_of([&] { node_process_data(net.nodes.at(hop), d, s.exp); }),
              ErrorCode::kSessionExpired);
    const DataStep st = node_process_data(net.nodes.at(hop), d, {s.exp.decaseconds - 1});
    d = st.packet;
    hop = st.route.next_hop;
  }
  EXPECT_EQ(error_of([&] { source_send_data(s, Bytes{1}, s.exp, net.rng); }),
            ErrorCode::kSessionExpired);
}

TEST(DataErrors, DataBeforeControlIsUnknown) {
  LineNet net(2, 1, 93);
  SessionState s = net.establish();
  EXPECT_EQ(error_of([&] { net.deliver(source_send_data(s, Bytes{1}, net.now, net.rng), s); }),
            ErrorCode::kUnknownSession);
  EXPECT_EQ(error_of([&] { source_send_data(s, Bytes(600), net.now, net.rng); }),
            ErrorCode::kPayloadTooLarge);
}

TEST(DataErrors, UnknownTypeForSetupProcessing) {
  LineNet net(2, 1, 94);
  SessionState s = net.establish();
  SetupPacket wrong;
  wrong.chdr.type = PacketType::kDataForward;
  EXPECT_EQ(error_of([&] { node_process_setup(net.nodes.at(1), wrong, net.now); }),
            ErrorCode::kUnknownType);
}

}  // namespace
}  // namespace hornet
