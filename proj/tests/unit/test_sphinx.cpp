#include <gtest/gtest.h>

#include "hornet/error.hpp"
#include "hornet/sphinx.hpp"

namespace hornet {
namespace {

struct Node {
  Scalar secret;
  GroupElement pub;
};

struct Fixture {
  std::vector<Node> fwd;
  std::vector<Node> bwd;
  BootstrapInput input;
  CommonHeader chdr;
};

Fixture make(Rng& rng, std::size_t lf, std::size_t lb) {
  Fixture f;
  f.input.source_secret = rng.scalar();
  for (std::size_t i = 0; i < lf; ++i) {
    Node n{rng.scalar(), {}};
    n.pub = crypto::public_from_secret(n.secret);
    f.fwd.push_back(n);
    f.input.forward.push_back(
        {n.pub, {static_cast<std::uint32_t>(i + 2), 0,
                 static_cast<std::uint16_t>(i + 1 == lf ? RoutingSegment::kDestinationFlag : 0)}});
  }
  for (std::size_t j = 0; j < lb; ++j) {
    Node n{rng.scalar(), {}};
    n.pub = crypto::public_from_secret(n.secret);
    f.bwd.push_back(n);
    f.input.backward.push_back({n.pub, {static_cast<std::uint32_t>(100 + j), 0, 0}});
  }
  f.chdr.type = PacketType::kSetupForward;
  f.chdr.hops = static_cast<std::uint8_t>(kMaxHops);
  f.chdr.exp = {4242};
  return f;
}

CommonHeader backward_chdr(CommonHeader c) {
  c.type = PacketType::kSetupBackward;
  return c;
}

TEST(SphinxHeaderTest, SerializedSize) {
  EXPECT_EQ(kSphinxHeaderSize, 384u);
  SphinxHeader h;
  h.gamma[3] = 9;
  EXPECT_EQ(SphinxHeader::parse(h.serialize()), h);
  EXPECT_THROW(SphinxHeader::parse(Bytes(383)), Error);
}

TEST(SphinxHeaderTest, BothPathsYieldSourceKeysAndRoutes) {
  Rng rng(61);
  for (std::size_t lf = 1; lf <= kMaxHops; ++lf) {
    const std::size_t lb = 1 + (lf * 3) % kMaxHops;
    const Fixture f = make(rng, lf, lb);
    const SphinxHeaders hs = gen_sphx_hdr(f.input, f.chdr, rng);
    ASSERT_EQ(hs.keys.forward.size(), lf);
    ASSERT_EQ(hs.keys.backward.size(), lb);

    SphinxHeader h = hs.forward;
    SphinxPayload pl;
    for (std::size_t i = 0; i < lf; ++i) {
      const SphinxStep st = proc_sphx_pkt(h, pl, f.fwd[i].secret, f.chdr);
      EXPECT_EQ(st.key, hs.keys.forward[i]);
      EXPECT_EQ(st.route, f.input.forward[i].route);
      h = st.header;
    }
    h = hs.backward;
    const CommonHeader bc = backward_chdr(f.chdr);
    for (std::size_t j = 0; j < lb; ++j) {
      const SphinxStep st = proc_sphx_pkt(h, pl, f.bwd[j].secret, bc);
      EXPECT_EQ(st.key, hs.keys.backward[j]);
      EXPECT_EQ(st.route, f.input.backward[j].route);
      h = st.header;
    }
    EXPECT_EQ(h.y, hs.backward_final_y);
  }
}

TEST(SphinxHeaderTest, MacBindsCommonHeaderAndBeta) {
  Rng rng(62);
  const Fixture f = make(rng, 3, 2);
  const SphinxHeaders hs = gen_sphx_hdr(f.input, f.chdr, rng);
  CommonHeader other = f.chdr;
  other.exp = {4243};
  EXPECT_THROW(proc_sphx_pkt(hs.forward, {}, f.fwd[0].secret, other), Error);
  EXPECT_THROW(proc_sphx_pkt(hs.forward, {}, f.fwd[0].secret, backward_chdr(f.chdr)), Error);
  SphinxHeader t = hs.forward;
  t.beta[100] ^= 1;
  EXPECT_THROW(proc_sphx_pkt(t, {}, f.fwd[0].secret, f.chdr), Error);
  EXPECT_THROW(proc_sphx_pkt(hs.forward, {}, f.fwd[1].secret, f.chdr), Error);
}

TEST(SphinxHeaderTest, RejectsLongPathsAndBadKeys) {
  Rng rng(63);
  Fixture f = make(rng, 7, 1);
  f.input.forward.push_back(f.input.forward.back());
  try {
    gen_sphx_hdr(f.input, f.chdr, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPathTooLong);
  }
  Fixture g = make(rng, 2, 2);
  g.input.backward[1].public_key = GroupElement{};
  EXPECT_THROW(gen_sphx_hdr(g.input, g.chdr, rng), Error);
}

TEST(SphinxHeaderTest, ForwardAndBackwardElementsDiffer) {
  Rng rng(64);
  const Fixture f = make(rng, 2, 2);
  const SphinxHeaders hs = gen_sphx_hdr(f.input, f.chdr, rng);
  EXPECT_NE(hs.forward.y, hs.backward.y);
}

TEST(SphinxPayloadTest, LayersPeelAlongBothPaths) {
  Rng rng(65);
  for (std::size_t l = 1; l <= kMaxHops; ++l) {
    const Fixture f = make(rng, l, l);
    const SphinxHeaders hs = gen_sphx_hdr(f.input, f.chdr, rng);
    const Bytes inner = rng.bytes(1 + rng.uniform(kSphinxPayloadCapacity));

    SphinxHeader h = hs.forward;
    SphinxPayload p = gen_sphx_pl_send(hs.keys.forward, inner);
    for (std::size_t i = 0; i < l; ++i) {
      const SphinxStep st = proc_sphx_pkt(h, p, f.fwd[i].secret, f.chdr);
      h = st.header;
      p = st.payload;
    }
    const SymKey dest = hs.keys.forward.back();
    EXPECT_EQ(unwrap_sphx_pl_send(dest, p), inner);

    const Bytes reply = rng.bytes(rng.uniform(kSphinxPayloadCapacity + 1));
    h = hs.backward;
    p = gen_sphx_pl_recv(dest, reply);
    for (std::size_t j = 0; j < l; ++j) {
      const SphinxStep st = proc_sphx_pkt(h, p, f.bwd[j].secret, backward_chdr(f.chdr));
      h = st.header;
      p = st.payload;
    }
    EXPECT_EQ(unwrap_sphx_pl_recv(hs.keys.backward, dest, p), reply);
    p.bytes[200] ^= 1;
    EXPECT_THROW(unwrap_sphx_pl_recv(hs.keys.backward, dest, p), Error);
  }
  EXPECT_THROW(gen_sphx_pl_recv(SymKey{}, Bytes(kSphinxPayloadCapacity + 1)), Error);
}

}  // namespace
}  // namespace hornet
