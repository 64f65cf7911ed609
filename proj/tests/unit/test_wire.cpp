#include <gtest/gtest.h>

#include "hornet/error.hpp"
#include "hornet/wire.hpp"

namespace hornet {
namespace {

ErrorCode code_of(ByteSpan bytes) {
  try {
    decode(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode accepted malformed input";
  return ErrorCode::kValidation;
}

SetupPacket random_setup(Rng& rng) {
  SetupPacket p;
  p.chdr.type = PacketType::kSetupBackward;
  p.chdr.exp = {0xdeadbeef};
  rng.fill(p.shdr.y.bytes);
  rng.fill(p.shdr.beta);
  rng.fill(p.shdr.gamma);
  rng.fill(p.payload.bytes);
  rng.fill(p.fs_payload.bytes);
  return p;
}

DataPacket random_data(Rng& rng, bool nested, std::size_t payload) {
  DataPacket d;
  d.chdr.type = PacketType::kDataBackward;
  d.chdr.nested = nested;
  rng.fill(d.iv.bytes);
  if (nested) {
    NestedAhdr h;
    rng.fill(h.bytes);
    d.header = h;
  } else {
    Ahdr h;
    rng.fill(h.bytes);
    d.header = h;
  }
  d.payload = rng.bytes(payload);
  return d;
}

TEST(WireSizes, MatchFormulas) {
  EXPECT_EQ(kSetupPacketSize, 1144u);
  EXPECT_EQ(kDataHeaderSize, 360u);
  EXPECT_EQ(kPaperDataHeaderSize, 344u);
  EXPECT_EQ(kPaperDataHeaderSize + kIvSize, kDataHeaderSize);
  EXPECT_EQ(kNestedDataHeaderSize, 696u);
}

TEST(CommonHeaderTest, Layout) {
  CommonHeader c;
  c.type = PacketType::kSetupForward;
  c.exp = {0x01020304};
  EXPECT_EQ(to_hex(c.serialize()), "0107010203040000");
  CommonHeader d;
  d.type = PacketType::kDataForward;
  d.nested = true;
  EXPECT_EQ(to_hex(d.serialize()), "8307000000000000");
  EXPECT_EQ(CommonHeader::parse(d.serialize()), d);
}

TEST(CommonHeaderTest, StrictParsing) {
  auto parse_code = [](const char* hex) {
    try {
      CommonHeader::parse(from_hex(hex));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kValidation;
  };
  EXPECT_EQ(parse_code("0507000000000000"), ErrorCode::kUnknownType);
  EXPECT_EQ(parse_code("8107000000000000"), ErrorCode::kUnknownType);
  EXPECT_EQ(parse_code("0306000000000000"), ErrorCode::kLengthMismatch);
  EXPECT_EQ(parse_code("0307000000000001"), ErrorCode::kLengthMismatch);
  EXPECT_EQ(parse_code("0107000000000100"), ErrorCode::kLengthMismatch);
  EXPECT_EQ(parse_code("01070000"), ErrorCode::kTruncatedPacket);
}

TEST(Codec, SetupRoundTrip) {
  Rng rng(71);
  const SetupPacket p = random_setup(rng);
  const Bytes raw = encode(p);
  ASSERT_EQ(raw.size(), kSetupPacketSize);
  EXPECT_EQ(std::get<SetupPacket>(decode(raw)), p);
  EXPECT_EQ(code_of(ByteSpan(raw).first(raw.size() - 1)), ErrorCode::kTruncatedPacket);
  Bytes longer = raw;
  longer.push_back(0);
  EXPECT_EQ(code_of(longer), ErrorCode::kLengthMismatch);
}

TEST(Codec, DataRoundTripAllSizes) {
  Rng rng(72);
  for (bool nested : {false, true}) {
    for (std::size_t size = kMinPayloadSize; size <= kMaxPayloadSize; size += 16 * 17) {
      const DataPacket d = random_data(rng, nested, size);
      const Bytes raw = encode(d);
      ASSERT_EQ(raw.size(), d.size());
      EXPECT_EQ(std::get<DataPacket>(decode(raw)), d);
    }
  }
}

TEST(Codec, DataLengthErrors) {
  Rng rng(73);
  const Bytes raw = encode(random_data(rng, false, 64));
  EXPECT_EQ(code_of(ByteSpan(raw).first(kDataHeaderSize + 16)), ErrorCode::kTruncatedPacket);
  EXPECT_EQ(code_of(ByteSpan(raw).first(raw.size() - 1)), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of(Bytes{}), ErrorCode::kTruncatedPacket);

  DataPacket bad = random_data(rng, false, 64);
  bad.chdr.nested = true;
  EXPECT_THROW(encode(bad), Error);
  DataPacket odd = random_data(rng, false, 40);
  EXPECT_THROW(encode(odd), Error);
}

// Random byte strings never crash the decoder and either decode to a packet
// that re-encodes to the same bytes or raise a library error.
TEST(Codec, FuzzNeverReadsPastInput) {
  Rng rng(74);
  const std::size_t interesting[] = {0, 1, 7, 8, 9, 391, 392, 1143, 1144, 1145, 392, 408, 424,
                                     696, 728, 729, 4456};
  std::size_t decoded = 0;
  for (int i = 0; i < 4000; ++i) {
    const std::size_t n = i % 2 ? interesting[rng.uniform(std::size(interesting))]
                                : static_cast<std::size_t>(rng.uniform(1400));
    Bytes raw = rng.bytes(n);
    if (n >= 2 && rng.uniform(2)) {
      raw[0] = static_cast<std::uint8_t>(1 + rng.uniform(4));
      raw[1] = 7;
      for (std::size_t k = 2; k < std::min<std::size_t>(n, 8); ++k) raw[k] = 0;
    }
    try {
      const Packet p = decode(raw);
      EXPECT_EQ(encode(p), raw);
      ++decoded;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(decoded, 0u);
}

}  // namespace
}  // namespace hornet
