#pragma once

#include <bitset>
#include <cstdint>

namespace hornet {

// End-host duplicate detection over the most recent 1024 sequence numbers.
// Anything older than the window is treated as a replay.
class ReplayWindow {
 public:
  static constexpr std::uint64_t kWidth = 1024;

  // Throws kReplayDetected for a duplicate or a too-old sequence number;
  // otherwise records `seq`.
  void accept(std::uint64_t seq);
  bool seen(std::uint64_t seq) const;
  std::uint64_t highest() const { return highest_; }

 private:
  bool empty_ = true;
  std::uint64_t highest_ = 0;
  std::bitset<kWidth> bits_;  // bit (s % kWidth) for s in (highest - kWidth, highest]
};

}  // namespace hornet
