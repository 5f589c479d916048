#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmer/tensor/optim.hpp"
#include "hmer/tensor/tensor.hpp"

namespace hmer::tensor {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Shape shape;
  Precision precision = Precision::f32;
  std::vector<std::uint8_t> raw;  // little-endian element bytes

  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

/// File layout: 8-byte magic "HMERCKPT", u32 version, u64 header length, a
/// JSON header (metadata object + entry table with byte offsets), then the
/// concatenated raw entry payloads.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string metadata_json = "{}";
  std::vector<CheckpointEntry> entries;

  template <typename T>
  void add_parameters(const ParameterStore<T>& params);

  /// Converts every entry to T. Entries stored at another precision are cast.
  template <typename T>
  ParameterStore<T> parameters() const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hmer::tensor
