#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hood/dsp/pipeline.hpp"
#include "hood/model/augment.hpp"
#include "hood/radar/scene.hpp"
#include "hood/radar/simulator.hpp"

namespace hood::io {

/// File layout (little-endian):
///   "HOODDS1\0"  u16 version  u16 kind  u32 rank  u64 dims[rank]
///   labels: dims[0] x { u32 scene_id, u32 frame_index, u8 category, u8 pad[3] }
///   payload: product(dims) float32, row-major
///   u32 CRC-32 of every preceding byte
inline constexpr std::string_view kDatasetMagic{"HOODDS1\0", 8};
inline constexpr std::uint16_t kDatasetVersion = 1;

enum class DatasetKind : std::uint16_t { raw_frames = 0, rdi_macro = 1, rdi_micro = 2, paired_rdi = 3 };

std::string_view to_string(DatasetKind kind);

struct SampleLabel {
  std::uint32_t scene_id = 0;
  std::uint32_t frame_index = 0;
  radar::Category category = radar::Category::unlabeled;

  friend bool operator==(const SampleLabel&, const SampleLabel&) = default;
};

/// dims[0] is the sample count. Item dims by kind:
///   raw_frames [rx, chirps, samples], rdi_* [doppler, range], paired_rdi [2, doppler, range].
struct Dataset {
  DatasetKind kind = DatasetKind::paired_rdi;
  std::vector<std::uint64_t> dims;
  std::vector<SampleLabel> labels;
  std::vector<float> payload;

  std::size_t samples() const { return dims.empty() ? 0 : static_cast<std::size_t>(dims[0]); }
  std::size_t item_size() const;
  std::span<const float> item(std::size_t i) const;
  /// Kind-specific rank, label count and payload length.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const std::uint8_t> bytes, const std::string& what = "dataset");
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

/// Raw frames of one recording, all labeled with the same scene and category.
Dataset raw_dataset(std::span<const radar::FrameCube> frames, std::uint32_t scene_id, radar::Category category);
/// Header-only raw_frames dataset with zero frames; also the live-stream preamble.
Dataset raw_dataset_header(std::size_t n_rx, std::size_t n_chirps, std::size_t n_samples);
std::vector<radar::FrameCube> frames_of(const Dataset& raw, double frame_period = 0.050);

/// Paired samples of one recording. Labels carry the window's last raw frame.
Dataset paired_dataset(std::span<const dsp::PairedRdi> pairs, std::uint32_t scene_id, radar::Category category);
std::vector<model::TrainingSample> samples_of(const Dataset& paired);

/// Runs of consecutive frames sharing a scene id, as [begin, end) item ranges.
std::vector<std::pair<std::size_t, std::size_t>> recordings_of(const Dataset& raw);

/// Preprocesses every recording of a raw_frames dataset and keeps every
/// `stride`-th paired sample of each. Recordings shorter than the DSP warm-up
/// are a ValidationError naming the minimum.
Dataset preprocess_dataset(const Dataset& raw, const dsp::DspConfig& config, std::size_t stride = 1);

/// Concatenates datasets of equal kind and item dims.
Dataset concat(std::span<const Dataset> parts);
/// Items at `indices`, in that order.
Dataset select(const Dataset& dataset, std::span<const std::size_t> indices);

struct Split {
  Dataset train;
  Dataset test;
  std::optional<std::string> warning;
};

/// Scene-disjoint split. Scene ids are grouped by category and each group is
/// shuffled with `seed`; round(fraction x group size) ids go to training.
Split split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed);

}  // namespace hood::io
