#include "hornet/replay_window.hpp"

#include <string>

#include "hornet/error.hpp"

namespace hornet {

bool ReplayWindow::seen(std::uint64_t seq) const {
  if (empty_ || seq > highest_) return false;
  if (highest_ - seq >= kWidth) return true;
  return bits_.test(seq % kWidth);
}

void ReplayWindow::accept(std::uint64_t seq) {
  if (seen(seq)) {
    throw Error(ErrorCode::kReplayDetected, "sequence number " + std::to_string(seq));
  }
  if (empty_) {
    empty_ = false;
    highest_ = seq;
  } else if (seq > highest_) {
    const std::uint64_t shift = seq - highest_;
    if (shift >= kWidth) {
      bits_.reset();
    } else {
      for (std::uint64_t s = highest_ + 1; s <= seq; ++s) bits_.reset(s % kWidth);
    }
    highest_ = seq;
  }
  bits_.set(seq % kWidth);
}

}  // namespace hornet
