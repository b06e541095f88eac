#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "hood/dsp/rdi.hpp"

namespace hood::dsp {

inline constexpr std::size_t kErespdWindow = 200;  // 10 s at 50 ms frames

/// Sliding-window accumulation: output[i] is the element-wise sum of input
/// frames i .. i + window - 1 and carries frame i's index. Output length is
/// size - window + 1; throws when the sequence is shorter than the window.
RdiSequence erespd(const RdiSequence& sequence, std::size_t window = kErespdWindow);

/// Incremental E-RESPD. Buffers window - 1 frames, then emits one
/// accumulated frame per input by adding the newest frame and subtracting the
/// oldest. Single owner; no internal locking.
class ErespdStream {
 public:
  explicit ErespdStream(std::size_t window = kErespdWindow);

  std::optional<RdiFrame> push(const RdiFrame& frame);

  std::size_t window() const { return window_; }
  std::size_t buffered() const { return buffer_.size(); }
  void reset();

 private:
  std::size_t window_;
  std::deque<RdiFrame> buffer_;
  std::vector<double> sum_;
  // The running sum is rebuilt from the buffer every this many updates to
  // bound floating-point drift on long streams.
  std::size_t updates_since_rebuild_ = 0;
  static constexpr std::size_t kRebuildInterval = 4096;
};

}  // namespace hood::dsp
