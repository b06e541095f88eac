#include "hood/io/stream.hpp"

#include <vector>

#include "hood/error.hpp"
#include "hood/io/binary.hpp"
#include "hood/io/dataset.hpp"

namespace hood::io {

namespace {

constexpr std::size_t kHeaderBytes = 8 + 2 + 2 + 4 + 4 * 8;

void write_bytes(std::ostream& out, const std::vector<std::uint8_t>& bytes) {
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("stream: write failed");
}

}  // namespace

void write_stream_header(std::ostream& out, const StreamHeader& header) {
  ByteWriter w;
  w.text(kDatasetMagic);
  w.u16(kDatasetVersion);
  w.u16(static_cast<std::uint16_t>(DatasetKind::raw_frames));
  w.u32(4);
  w.u64(0);
  w.u64(header.n_rx);
  w.u64(header.n_chirps);
  w.u64(header.n_samples);
  write_bytes(out, w.bytes());
}

StreamHeader read_stream_header(std::istream& in) {
  std::vector<std::uint8_t> bytes(kHeaderBytes);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  ByteReader r(bytes, "stream header");
  if (r.remaining() < kDatasetMagic.size() || r.text(kDatasetMagic.size()) != kDatasetMagic) {
    throw BadMagicError("stream header: bad magic");
  }
  const auto version = r.u16();
  if (version != kDatasetVersion) throw VersionError("stream header: unsupported version " + std::to_string(version));
  if (r.u16() != static_cast<std::uint16_t>(DatasetKind::raw_frames)) {
    throw SchemaError("stream header: kind must be raw_frames");
  }
  if (r.u32() != 4) throw SchemaError("stream header: rank must be 4");
  r.u64();
  StreamHeader h;
  h.n_rx = r.u64();
  h.n_chirps = r.u64();
  h.n_samples = r.u64();
  if (h.frame_values() == 0 || h.frame_values() > (std::size_t{1} << 28)) {
    throw SchemaError("stream header: implausible frame dims");
  }
  return h;
}

void write_stream_frame(std::ostream& out, const radar::FrameCube& frame) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(frame.data.size() * 4));
  std::vector<float> values(frame.data.begin(), frame.data.end());
  w.f32_array(values);
  write_bytes(out, w.bytes());
}

std::optional<radar::FrameCube> read_stream_frame(std::istream& in, const StreamHeader& header,
                                                  std::size_t frame_index, double frame_period) {
  std::uint8_t len_bytes[4];
  in.read(reinterpret_cast<char*>(len_bytes), 4);
  if (in.gcount() == 0 && in.eof()) return std::nullopt;
  if (in.gcount() != 4) throw TruncatedError("stream: cut-off frame length");
  const std::uint32_t len = static_cast<std::uint32_t>(len_bytes[0]) | static_cast<std::uint32_t>(len_bytes[1]) << 8 |
                            static_cast<std::uint32_t>(len_bytes[2]) << 16 |
                            static_cast<std::uint32_t>(len_bytes[3]) << 24;
  if (len != header.frame_values() * 4) {
    throw ShapeError("stream: frame of " + std::to_string(len) + " bytes, header implies " +
                     std::to_string(header.frame_values() * 4));
  }
  std::vector<std::uint8_t> payload(len);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(len));
  if (static_cast<std::size_t>(in.gcount()) != len) throw TruncatedError("stream: cut-off frame payload");
  ByteReader r(payload, "stream frame");
  std::vector<float> values(header.frame_values());
  r.f32_array(values);
  radar::FrameCube f;
  f.data.assign(values.begin(), values.end());
  f.n_rx = header.n_rx;
  f.n_chirps = header.n_chirps;
  f.n_samples = header.n_samples;
  f.frame_index = frame_index;
  f.timestamp = static_cast<double>(frame_index) * frame_period;
  return f;
}

}  // namespace hood::io
