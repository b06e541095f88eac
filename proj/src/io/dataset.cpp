#include "hood/io/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "hood/error.hpp"
#include "hood/io/binary.hpp"

namespace hood::io {

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::raw_frames:
      return "raw_frames";
    case DatasetKind::rdi_macro:
      return "rdi_macro";
    case DatasetKind::rdi_micro:
      return "rdi_micro";
    case DatasetKind::paired_rdi:
      return "paired_rdi";
  }
  return "unknown";
}

namespace {

std::size_t expected_rank(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::raw_frames:
    case DatasetKind::paired_rdi:
      return 4;
    case DatasetKind::rdi_macro:
    case DatasetKind::rdi_micro:
      return 3;
  }
  throw SchemaError("dataset: unknown kind");
}

bool valid_category(std::uint8_t code) {
  return code <= static_cast<std::uint8_t>(radar::Category::ood) ||
         code == static_cast<std::uint8_t>(radar::Category::unlabeled);
}

std::size_t checked_product(std::span<const std::uint64_t> dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > (std::uint64_t{1} << 40) / d) throw SchemaError("dataset: dims overflow");
    n *= d;
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

std::size_t Dataset::item_size() const {
  if (dims.size() < 2) return 0;
  return checked_product(std::span(dims).subspan(1));
}

std::span<const float> Dataset::item(std::size_t i) const {
  if (i >= samples()) throw ValidationError("dataset: item index out of range");
  const std::size_t n = item_size();
  return std::span<const float>(payload).subspan(i * n, n);
}

void Dataset::validate() const {
  if (dims.size() != expected_rank(kind)) {
    throw SchemaError("dataset: kind " + std::string(to_string(kind)) + " needs rank " +
                      std::to_string(expected_rank(kind)) + ", got " + std::to_string(dims.size()));
  }
  if (kind == DatasetKind::paired_rdi && dims[1] != 2) throw SchemaError("dataset: paired_rdi needs dims[1] == 2");
  if (labels.size() != samples()) throw SchemaError("dataset: label count differs from sample count");
  if (payload.size() != checked_product(dims)) throw SchemaError("dataset: payload length differs from dims");
}

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset) {
  dataset.validate();
  ByteWriter w;
  w.text(kDatasetMagic);
  w.u16(kDatasetVersion);
  w.u16(static_cast<std::uint16_t>(dataset.kind));
  w.u32(static_cast<std::uint32_t>(dataset.dims.size()));
  for (auto d : dataset.dims) w.u64(d);
  for (const auto& l : dataset.labels) {
    w.u32(l.scene_id);
    w.u32(l.frame_index);
    w.u8(static_cast<std::uint8_t>(l.category));
    w.u8(0);
    w.u8(0);
    w.u8(0);
  }
  w.f32_array(dataset.payload);
  const auto crc = crc32(w.bytes());
  w.u32(crc);
  return w.bytes();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes, const std::string& what) {
  ByteReader r(bytes, what);
  if (r.remaining() < kDatasetMagic.size() || r.text(kDatasetMagic.size()) != kDatasetMagic) {
    throw BadMagicError(what + ": not a dataset file (bad magic)");
  }
  const auto version = r.u16();
  if (version != kDatasetVersion) {
    throw VersionError(what + ": unsupported dataset version " + std::to_string(version));
  }
  Dataset ds;
  const auto kind = r.u16();
  if (kind > static_cast<std::uint16_t>(DatasetKind::paired_rdi)) {
    throw SchemaError(what + ": unknown dataset kind " + std::to_string(kind));
  }
  ds.kind = static_cast<DatasetKind>(kind);
  const auto rank = r.u32();
  if (rank != expected_rank(ds.kind)) {
    throw SchemaError(what + ": rank " + std::to_string(rank) + " does not fit kind " +
                      std::string(to_string(ds.kind)));
  }
  for (std::uint32_t i = 0; i < rank; ++i) ds.dims.push_back(r.u64());
  const std::size_t total = checked_product(ds.dims);
  const std::size_t n = ds.samples();
  r.require(n * 12 + total * 4 + 4);
  ds.labels.resize(n);
  for (auto& l : ds.labels) {
    l.scene_id = r.u32();
    l.frame_index = r.u32();
    const auto code = r.u8();
    if (!valid_category(code)) throw SchemaError(what + ": invalid category code " + std::to_string(code));
    l.category = static_cast<radar::Category>(code);
    r.raw(3);
  }
  ds.payload.resize(total);
  r.f32_array(ds.payload);
  const std::size_t body = r.position();
  const auto stored = r.u32();
  if (stored != crc32(bytes.subspan(0, body))) throw ChecksumError(what + ": checksum mismatch");
  if (r.remaining() != 0) throw SchemaError(what + ": trailing bytes after checksum");
  ds.validate();
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file_atomic(path, encode_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path), path.string()); }

Dataset raw_dataset_header(std::size_t n_rx, std::size_t n_chirps, std::size_t n_samples) {
  Dataset ds;
  ds.kind = DatasetKind::raw_frames;
  ds.dims = {0, n_rx, n_chirps, n_samples};
  return ds;
}

Dataset raw_dataset(std::span<const radar::FrameCube> frames, std::uint32_t scene_id, radar::Category category) {
  if (frames.empty()) throw ValidationError("raw_dataset: no frames");
  const auto& f0 = frames.front();
  Dataset ds = raw_dataset_header(f0.n_rx, f0.n_chirps, f0.n_samples);
  ds.dims[0] = frames.size();
  ds.payload.reserve(frames.size() * f0.data.size());
  for (const auto& f : frames) {
    if (f.n_rx != f0.n_rx || f.n_chirps != f0.n_chirps || f.n_samples != f0.n_samples ||
        f.data.size() != f0.data.size()) {
      throw ShapeError("raw_dataset: frame shape changes within the recording");
    }
    ds.payload.insert(ds.payload.end(), f.data.begin(), f.data.end());
    ds.labels.push_back({scene_id, static_cast<std::uint32_t>(f.frame_index), category});
  }
  return ds;
}

std::vector<radar::FrameCube> frames_of(const Dataset& raw, double frame_period) {
  if (raw.kind != DatasetKind::raw_frames) {
    throw SchemaError("expected a raw_frames dataset, got " + std::string(to_string(raw.kind)));
  }
  std::vector<radar::FrameCube> frames(raw.samples());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto& f = frames[i];
    const auto item = raw.item(i);
    f.data.assign(item.begin(), item.end());
    f.n_rx = raw.dims[1];
    f.n_chirps = raw.dims[2];
    f.n_samples = raw.dims[3];
    f.frame_index = raw.labels[i].frame_index;
    f.timestamp = static_cast<double>(f.frame_index) * frame_period;
  }
  return frames;
}

Dataset paired_dataset(std::span<const dsp::PairedRdi> pairs, std::uint32_t scene_id, radar::Category category) {
  Dataset ds;
  ds.kind = DatasetKind::paired_rdi;
  if (pairs.empty()) {
    ds.dims = {0, 2, 0, 0};
    return ds;
  }
  const auto& p0 = pairs.front();
  if (p0.micro.n_doppler != p0.macro.n_doppler || p0.micro.n_range != p0.macro.n_range) {
    throw ShapeError("paired_dataset: macro and micro images differ in size");
  }
  ds.dims = {pairs.size(), 2, p0.macro.n_doppler, p0.macro.n_range};
  const std::size_t plane = p0.macro.size();
  ds.payload.reserve(pairs.size() * 2 * plane);
  for (const auto& p : pairs) {
    if (p.macro.size() != plane || p.micro.size() != plane) throw ShapeError("paired_dataset: image size changes");
    ds.payload.insert(ds.payload.end(), p.macro.data.begin(), p.macro.data.end());
    ds.payload.insert(ds.payload.end(), p.micro.data.begin(), p.micro.data.end());
    ds.labels.push_back({scene_id, static_cast<std::uint32_t>(p.last_frame_index), category});
  }
  return ds;
}

std::vector<model::TrainingSample> samples_of(const Dataset& paired) {
  if (paired.kind != DatasetKind::paired_rdi) {
    throw SchemaError("expected a paired_rdi dataset, got " + std::string(to_string(paired.kind)));
  }
  const std::size_t rows = paired.dims[2];
  const std::size_t cols = paired.dims[3];
  const std::size_t plane = rows * cols;
  std::vector<model::TrainingSample> out(paired.samples());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto item = paired.item(i);
    auto fill = [&](dsp::RdiFrame& f, std::size_t offset, dsp::RdiKind kind) {
      f.data.assign(item.begin() + static_cast<std::ptrdiff_t>(offset),
                    item.begin() + static_cast<std::ptrdiff_t>(offset + plane));
      f.n_doppler = rows;
      f.n_range = cols;
      f.kind = kind;
      f.frame_index = paired.labels[i].frame_index;
    };
    fill(out[i].macro, 0, dsp::RdiKind::macro);
    fill(out[i].micro, plane, dsp::RdiKind::micro);
    out[i].category = paired.labels[i].category;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> recordings_of(const Dataset& raw) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= raw.labels.size(); ++i) {
    if (i == raw.labels.size() || raw.labels[i].scene_id != raw.labels[begin].scene_id ||
        raw.labels[i].frame_index != raw.labels[i - 1].frame_index + 1) {
      runs.emplace_back(begin, i);
      begin = i;
    }
  }
  return runs;
}

Dataset preprocess_dataset(const Dataset& raw, const dsp::DspConfig& config, std::size_t stride) {
  if (stride == 0) throw ValidationError("preprocess: stride must be >= 1");
  const auto frames = frames_of(raw);
  const std::size_t minimum = dsp::min_frames_for_pair(config);
  std::vector<Dataset> parts;
  for (const auto& [begin, end] : recordings_of(raw)) {
    const auto& label = raw.labels[begin];
    if (end - begin < minimum) {
      throw ValidationError("preprocess: recording of scene " + std::to_string(label.scene_id) + " has " +
                            std::to_string(end - begin) + " frames; at least " + std::to_string(minimum) +
                            " are needed");
    }
    const auto pairs = dsp::preprocess_recording(
        std::span<const radar::FrameCube>(frames).subspan(begin, end - begin), config);
    std::vector<dsp::PairedRdi> kept;
    for (std::size_t i = 0; i < pairs.size(); i += stride) kept.push_back(pairs[i]);
    parts.push_back(paired_dataset(kept, label.scene_id, label.category));
  }
  if (parts.empty()) {
    throw ValidationError("preprocess: input has no frames; at least " + std::to_string(minimum) + " are needed");
  }
  return concat(parts);
}

Dataset concat(std::span<const Dataset> parts) {
  if (parts.empty()) throw ValidationError("concat: nothing to concatenate");
  // Empty parts may carry placeholder item dims; the first non-empty part decides.
  const Dataset* shape = &parts.front();
  for (const auto& p : parts) {
    if (p.samples() > 0) {
      shape = &p;
      break;
    }
  }
  Dataset out;
  out.kind = shape->kind;
  out.dims = shape->dims;
  out.dims[0] = 0;
  for (const auto& p : parts) {
    p.validate();
    if (p.kind != out.kind) throw ShapeError("concat: datasets differ in kind");
    if (p.samples() == 0) continue;
    if (!std::equal(p.dims.begin() + 1, p.dims.end(), out.dims.begin() + 1)) {
      throw ShapeError("concat: datasets differ in item dims");
    }
    out.dims[0] += p.dims[0];
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.payload.insert(out.payload.end(), p.payload.begin(), p.payload.end());
  }
  return out;
}

Dataset select(const Dataset& dataset, std::span<const std::size_t> indices) {
  Dataset out;
  out.kind = dataset.kind;
  out.dims = dataset.dims;
  out.dims[0] = indices.size();
  const std::size_t n = dataset.item_size();
  out.payload.reserve(indices.size() * n);
  for (auto i : indices) {
    const auto item = dataset.item(i);
    out.payload.insert(out.payload.end(), item.begin(), item.end());
    out.labels.push_back(dataset.labels[i]);
  }
  return out;
}

Split split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw ValidationError("split: train fraction must lie in [0, 1]");
  }
  std::map<radar::Category, std::set<std::uint32_t>> by_category;
  std::set<std::uint32_t> all_ids;
  std::map<std::uint32_t, radar::Category> category_of;
  for (const auto& l : dataset.labels) {
    auto [it, fresh] = category_of.emplace(l.scene_id, l.category);
    if (!fresh && it->second != l.category) {
      throw ValidationError("split: scene " + std::to_string(l.scene_id) + " carries more than one category");
    }
    by_category[l.category].insert(l.scene_id);
    all_ids.insert(l.scene_id);
  }
  if (all_ids.size() < 2) throw ValidationError("split: needs at least 2 distinct scene ids");

  std::mt19937_64 rng(seed);
  std::set<std::uint32_t> train_ids;
  for (auto& [category, ids] : by_category) {
    std::vector<std::uint32_t> order(ids.begin(), ids.end());
    std::shuffle(order.begin(), order.end(), rng);
    const auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(order.size())));
    train_ids.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    (train_ids.count(dataset.labels[i].scene_id) ? train_idx : test_idx).push_back(i);
  }
  Split s;
  s.train = select(dataset, train_idx);
  s.test = select(dataset, test_idx);
  if (test_idx.empty()) s.warning = "split: test split is empty";
  if (train_idx.empty()) s.warning = "split: train split is empty";
  return s;
}

}  // namespace hood::io
