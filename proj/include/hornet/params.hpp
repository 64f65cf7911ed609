#pragma once

#include <cstddef>

namespace hornet {

// Protocol constants. Sizes are in bytes.
inline constexpr std::size_t kKeySize = 16;                  // k
inline constexpr std::size_t kMacSize = 16;                  // k
inline constexpr std::size_t kFsSize = 32;                   // |FS|
inline constexpr std::size_t kBlockSize = kFsSize + kMacSize;  // c
inline constexpr std::size_t kMaxHops = 7;                   // r
inline constexpr std::size_t kAhdrSize = kMaxHops * kBlockSize;            // 336
inline constexpr std::size_t kNestedAhdrSize = 2 * kMaxHops * kBlockSize;  // 672
inline constexpr std::size_t kFsPayloadSize = kMaxHops * kBlockSize;       // 336
inline constexpr std::size_t kIvSize = 16;
inline constexpr std::size_t kChdrSize = 8;
inline constexpr std::size_t kRoutingSegmentSize = 8;
inline constexpr std::size_t kDefaultPayloadSize = 512;

// Group encoding (ristretto255).
inline constexpr std::size_t kGroupElementSize = 32;
inline constexpr std::size_t kScalarSize = 32;

// Longest PRG request: a nested header's keystream.
inline constexpr std::size_t kMaxPrgOutput = 2 * kMaxHops * kBlockSize;

}  // namespace hornet
