#include "hood/dsp/erespd.hpp"

#include <algorithm>
#include <string>

#include "hood/error.hpp"

namespace hood::dsp {

RdiSequence erespd(const RdiSequence& sequence, std::size_t window) {
  if (window < 1) throw ValidationError("E-RESPD window must be >= 1");
  if (sequence.size() < window) {
    throw ValidationError("E-RESPD needs at least " + std::to_string(window) + " frames, got " +
                          std::to_string(sequence.size()));
  }
  sequence.validate();
  ErespdStream stream(window);
  RdiSequence out;
  out.kind = sequence.kind;
  out.frames.reserve(sequence.size() - window + 1);
  for (const auto& frame : sequence.frames) {
    if (auto acc = stream.push(frame)) out.frames.push_back(std::move(*acc));
  }
  return out;
}

ErespdStream::ErespdStream(std::size_t window) : window_(window) {
  if (window_ < 1) throw ValidationError("E-RESPD window must be >= 1");
}

void ErespdStream::reset() {
  buffer_.clear();
  sum_.clear();
  updates_since_rebuild_ = 0;
}

std::optional<RdiFrame> ErespdStream::push(const RdiFrame& frame) {
  if (!buffer_.empty()) {
    const auto& ref = buffer_.front();
    if (frame.n_doppler != ref.n_doppler || frame.n_range != ref.n_range || frame.kind != ref.kind ||
        frame.data.size() != ref.data.size()) {
      throw ShapeError("E-RESPD stream: frame shape changed mid-stream");
    }
  } else if (sum_.empty()) {
    sum_.assign(frame.data.size(), 0.0);
  }

  buffer_.push_back(frame);
  for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += frame.data[k];
  if (buffer_.size() > window_) {
    const auto& oldest = buffer_.front();
    for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] -= oldest.data[k];
    buffer_.pop_front();
    if (++updates_since_rebuild_ >= kRebuildInterval) {
      std::fill(sum_.begin(), sum_.end(), 0.0);
      for (const auto& f : buffer_) {
        for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += f.data[k];
      }
      updates_since_rebuild_ = 0;
    }
  }
  if (buffer_.size() < window_) return std::nullopt;

  RdiFrame out;
  out.kind = buffer_.front().kind;
  out.n_doppler = buffer_.front().n_doppler;
  out.n_range = buffer_.front().n_range;
  out.frame_index = buffer_.front().frame_index;
  out.data = sum_;
  return out;
}

}  // namespace hood::dsp
