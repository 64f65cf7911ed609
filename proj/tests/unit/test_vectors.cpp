#include <gtest/gtest.h>

#include "hornet/vectors.hpp"
#include "hornet/wire.hpp"

namespace hornet::vectors {
namespace {

TEST(Vectors, GenerationIsDeterministic) {
  const auto a = generate();
  const auto b = generate();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].render(), b[i].render());
}

TEST(Vectors, RenderParseRoundTrip) {
  for (const VectorFile& f : generate()) {
    const VectorFile back = VectorFile::parse(f.filename, f.render());
    ASSERT_EQ(back.blobs.size(), f.blobs.size()) << f.filename;
    for (std::size_t i = 0; i < f.blobs.size(); ++i) {
      EXPECT_EQ(back.blobs[i].name, f.blobs[i].name);
      EXPECT_EQ(back.blobs[i].bytes, f.blobs[i].bytes);
    }
  }
  EXPECT_THROW(VectorFile::parse("x", "@ a\n00000000  zz\n"), std::invalid_argument);
}

TEST(Vectors, CommittedFilesMatch) {
  const auto results = check_all(std::filesystem::path(HORNET_SOURCE_DIR) / "vectors");
  ASSERT_FALSE(results.empty());
  for (const CheckResult& r : results) EXPECT_TRUE(r.ok) << r.file << " " << r.blob << ": " << r.detail;
}

TEST(Vectors, PacketBlobsHaveWireSizes) {
  for (const VectorFile& f : generate()) {
    if (f.filename != "packets.hex") continue;
    for (const Blob& b : f.blobs) {
      const Packet p = decode(b.bytes);
      EXPECT_EQ(encode(p), b.bytes) << b.name;
    }
  }
}

}  // namespace
}  // namespace hornet::vectors
