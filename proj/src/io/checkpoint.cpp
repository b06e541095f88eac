#include "hood/io/checkpoint.hpp"

#include <cmath>
#include <set>

#include "hood/error.hpp"
#include "hood/io/binary.hpp"

namespace hood::io {

namespace {

constexpr std::string_view kMomentPrefix = "adamax.m.";
constexpr std::string_view kNormPrefix = "adamax.u.";
constexpr std::string_view kStepName = "adamax.t";

std::vector<std::string> parameter_names(model::HoodModel<float>& model) {
  std::vector<std::string> names;
  model.visit_parameters([&](const std::string& n, nn::Parameter<float>&) { names.push_back(n); });
  return names;
}

}  // namespace

Checkpoint make_checkpoint(model::HoodModel<float>& model, const nn::Adamax<float>* optimizer) {
  Checkpoint ck;
  ck.config = model.config();
  model.visit_parameters([&](const std::string& n, nn::Parameter<float>& p) { ck.tensors[n] = p.value; });
  model.visit_buffers([&](const std::string& n, nn::Tensor<float>& t) { ck.tensors[n] = t; });
  if (optimizer) {
    const auto names = parameter_names(model);
    const auto& slots = optimizer->slots();
    if (slots.size() != names.size()) throw ValidationError("checkpoint: optimizer is not attached to this model");
    for (std::size_t i = 0; i < names.size(); ++i) {
      ck.tensors[std::string(kMomentPrefix) + names[i]] = slots[i].m;
      ck.tensors[std::string(kNormPrefix) + names[i]] = slots[i].u;
    }
    ck.tensors[std::string(kStepName)] = nn::Tensor<float>({1}, static_cast<float>(optimizer->steps_taken()));
    ck.has_optimizer_state = true;
  }
  return ck;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  ByteWriter w;
  w.text(kCheckpointMagic);
  w.u16(kCheckpointVersion);
  w.u16(ck.has_optimizer_state ? kFlagOptimizerState : 0);
  w.u32(static_cast<std::uint32_t>(ck.config.image_size));
  w.u32(static_cast<std::uint32_t>(ck.config.latent_dim));
  w.u32(static_cast<std::uint32_t>(ck.tensors.size()));
  std::uint64_t offset = 0;
  for (const auto& [name, t] : ck.tensors) {
    if (name.size() > 0xffff) throw ValidationError("checkpoint: tensor name too long");
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.text(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u64(d);
    w.u64(offset);
    offset += t.size();
  }
  w.u64(offset);
  const std::size_t payload_start = w.size();
  for (const auto& [name, t] : ck.tensors) w.f32_array(t.span());
  const auto crc = crc32(std::span(w.bytes()).subspan(payload_start));
  w.u32(crc);
  return w.bytes();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& what) {
  ByteReader r(bytes, what);
  if (r.remaining() < kCheckpointMagic.size() || r.text(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw BadMagicError(what + ": not a checkpoint file (bad magic)");
  }
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw VersionError(what + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  const auto flags = r.u16();
  if (flags & ~kFlagOptimizerState) throw SchemaError(what + ": unknown flag bits");
  ck.has_optimizer_state = (flags & kFlagOptimizerState) != 0;
  ck.config.image_size = r.u32();
  ck.config.latent_dim = r.u32();
  const auto count = r.u32();

  struct Entry {
    std::string name;
    nn::Shape shape;
    std::uint64_t offset;
  };
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    e.name = r.text(r.u16());
    const auto rank = r.u32();
    if (rank > 8) throw SchemaError(what + ": tensor " + e.name + " has rank " + std::to_string(rank));
    for (std::uint32_t k = 0; k < rank; ++k) e.shape.push_back(static_cast<std::size_t>(r.u64()));
    e.offset = r.u64();
    entries.push_back(std::move(e));
  }
  const auto payload_count = r.u64();
  if (payload_count > r.remaining() / 4) {
    throw TruncatedError(what + ": payload of " + std::to_string(payload_count) + " floats exceeds the file");
  }
  std::vector<float> payload(static_cast<std::size_t>(payload_count));
  const std::size_t payload_start = r.position();
  r.f32_array(payload);
  const auto stored = r.u32();
  if (stored != crc32(bytes.subspan(payload_start, payload.size() * 4))) {
    throw ChecksumError(what + ": payload checksum mismatch");
  }
  if (r.remaining() != 0) throw SchemaError(what + ": trailing bytes after checksum");

  for (const auto& e : entries) {
    const std::size_t n = nn::shape_size(e.shape);
    if (e.offset > payload.size() || n > payload.size() - e.offset) {
      throw SchemaError(what + ": tensor " + e.name + " lies outside the payload");
    }
    std::vector<float> data(payload.begin() + static_cast<std::ptrdiff_t>(e.offset),
                            payload.begin() + static_cast<std::ptrdiff_t>(e.offset + n));
    if (!ck.tensors.emplace(e.name, nn::Tensor<float>(e.shape, std::move(data))).second) {
      throw SchemaError(what + ": tensor " + e.name + " appears twice");
    }
  }
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, model::HoodModel<float>& model,
                      const nn::Adamax<float>* optimizer) {
  write_file_atomic(path, encode_checkpoint(make_checkpoint(model, optimizer)));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

model::HoodModel<float> load_model(const Checkpoint& ck) {
  model::HoodModel<float> m(ck.config);
  std::set<std::string> used;
  auto take = [&](const std::string& name, nn::Tensor<float>& dst) {
    auto it = ck.tensors.find(name);
    if (it == ck.tensors.end()) throw SchemaError("checkpoint: missing tensor " + name);
    if (it->second.shape() != dst.shape()) {
      throw SchemaError("checkpoint: tensor " + name + " has shape " + nn::shape_string(it->second.shape()) +
                        ", model expects " + nn::shape_string(dst.shape()));
    }
    dst = it->second;
    used.insert(name);
  };
  m.visit_parameters([&](const std::string& n, nn::Parameter<float>& p) { take(n, p.value); });
  m.visit_buffers([&](const std::string& n, nn::Tensor<float>& t) { take(n, t); });

  std::set<std::string> params;
  for (const auto& n : parameter_names(m)) params.insert(n);
  for (const auto& [name, t] : ck.tensors) {
    if (used.count(name)) continue;
    const bool optimizer_tensor =
        ck.has_optimizer_state &&
        (name == kStepName || (name.starts_with(kMomentPrefix) && params.count(name.substr(kMomentPrefix.size()))) ||
         (name.starts_with(kNormPrefix) && params.count(name.substr(kNormPrefix.size()))));
    if (!optimizer_tensor) throw SchemaError("checkpoint: unknown tensor " + name);
  }
  return m;
}

void load_optimizer(const Checkpoint& ck, model::HoodModel<float>& model, nn::Adamax<float>& optimizer) {
  if (!ck.has_optimizer_state) {
    throw ValidationError("checkpoint has no optimizer state; it can be used for inference but not to resume training");
  }
  const auto names = parameter_names(model);
  auto& slots = optimizer.slots();
  if (slots.size() != names.size()) throw ValidationError("optimizer is not attached to this model");
  auto get = [&](const std::string& name, const nn::Shape& shape) -> const nn::Tensor<float>& {
    auto it = ck.tensors.find(name);
    if (it == ck.tensors.end()) throw SchemaError("checkpoint: missing tensor " + name);
    if (it->second.shape() != shape) throw SchemaError("checkpoint: tensor " + name + " has the wrong shape");
    return it->second;
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    slots[i].m = get(std::string(kMomentPrefix) + names[i], slots[i].m.shape());
    slots[i].u = get(std::string(kNormPrefix) + names[i], slots[i].u.shape());
  }
  const float t = get(std::string(kStepName), {1})[0];
  if (!(t >= 0.0f) || std::floor(t) != t) throw SchemaError("checkpoint: invalid optimizer step count");
  optimizer.set_steps_taken(static_cast<std::uint64_t>(t));
}

}  // namespace hood::io
