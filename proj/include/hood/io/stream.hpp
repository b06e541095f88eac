#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>

#include "hood/radar/simulator.hpp"

namespace hood::io {

/// Live frame framing: the header of a raw_frames dataset with zero frames
/// (magic through dims, no labels, no checksum), then per frame a u32 byte
/// length followed by that many bytes of little-endian float32 samples in
/// [rx][chirp][sample] order.
struct StreamHeader {
  std::size_t n_rx = 0;
  std::size_t n_chirps = 0;
  std::size_t n_samples = 0;

  std::size_t frame_values() const { return n_rx * n_chirps * n_samples; }
};

void write_stream_header(std::ostream& out, const StreamHeader& header);
StreamHeader read_stream_header(std::istream& in);

void write_stream_frame(std::ostream& out, const radar::FrameCube& frame);
/// Next frame, or nullopt on a clean end of stream. A length that does not
/// match the header is a ShapeError; a cut-off frame a TruncatedError.
std::optional<radar::FrameCube> read_stream_frame(std::istream& in, const StreamHeader& header,
                                                  std::size_t frame_index, double frame_period = 0.050);

}  // namespace hood::io
