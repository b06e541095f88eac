#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hood/model/hood_model.hpp"
#include "hood/nn/adamax.hpp"

namespace hood::io {

/// File layout (little-endian):
///   "HOODCK1\0"  u16 version  u16 flags (bit 0: optimizer state)
///   u32 image_size  u32 latent_dim  u32 tensor_count
///   directory: tensor_count x { u16 name_len, name, u32 rank, u64 dims[rank], u64 offset }
///   u64 payload_count  payload: float32[payload_count]
///   u32 CRC-32 of the payload bytes
/// Offsets count floats from the start of the payload.
inline constexpr std::string_view kCheckpointMagic{"HOODCK1\0", 8};
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr std::uint16_t kFlagOptimizerState = 1;

struct Checkpoint {
  model::ModelConfig config;
  bool has_optimizer_state = false;
  std::map<std::string, nn::Tensor<float>> tensors;
};

/// Captures parameters, batch-norm statistics and, when given, the optimizer
/// moments (named adamax.m.<param>, adamax.u.<param>) and step count (adamax.t).
Checkpoint make_checkpoint(model::HoodModel<float>& model, const nn::Adamax<float>* optimizer = nullptr);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& what = "checkpoint");

void write_checkpoint(const std::filesystem::path& path, model::HoodModel<float>& model,
                      const nn::Adamax<float>* optimizer = nullptr);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Builds the model; every model tensor must be present with its exact
/// shape, and no unknown names are allowed.
model::HoodModel<float> load_model(const Checkpoint& checkpoint);

/// Restores optimizer state into an optimizer already attached to `model`'s
/// parameters. Throws ValidationError when the checkpoint has none.
void load_optimizer(const Checkpoint& checkpoint, model::HoodModel<float>& model, nn::Adamax<float>& optimizer);

}  // namespace hood::io
