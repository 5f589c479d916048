#include "hmer/tensor/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hmer/error.hpp"
#include "json.hpp"

namespace hmer::tensor {
namespace {

constexpr char kMagic[8] = {'H', 'M', 'E', 'R', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw DataError("checkpoint: truncated header");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

template <typename T>
std::vector<std::uint8_t> to_le_bytes(const Tensor<T>& t) {
  std::vector<std::uint8_t> raw(t.size() * sizeof(T));
  std::memcpy(raw.data(), t.data(), raw.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < raw.size(); i += sizeof(T)) std::reverse(raw.begin() + i, raw.begin() + i + sizeof(T));
  }
  return raw;
}

template <typename T>
std::vector<T> from_le_bytes(const std::vector<std::uint8_t>& raw) {
  std::vector<std::uint8_t> bytes = raw;
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < bytes.size(); i += sizeof(T)) std::reverse(bytes.begin() + i, bytes.begin() + i + sizeof(T));
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
  return out;
}

std::size_t element_bytes(Precision p) { return p == Precision::f32 ? 4 : 8; }

}  // namespace

template <typename T>
void Checkpoint::add_parameters(const ParameterStore<T>& params) {
  for (const auto& [name, tensor] : params) {
    entries.push_back(CheckpointEntry{name, tensor.shape(), precision_of<T>(), to_le_bytes(tensor)});
  }
}

template <typename T>
ParameterStore<T> Checkpoint::parameters() const {
  ParameterStore<T> out;
  for (const auto& e : entries) {
    if (e.precision == Precision::f32) {
      out.emplace(e.name, Tensor<float>(e.shape, from_le_bytes<float>(e.raw)).template cast<T>());
    } else {
      out.emplace(e.name, Tensor<double>(e.shape, from_le_bytes<double>(e.raw)).template cast<T>());
    }
  }
  return out;
}

template void Checkpoint::add_parameters<float>(const ParameterStore<float>&);
template void Checkpoint::add_parameters<double>(const ParameterStore<double>&);
template ParameterStore<float> Checkpoint::parameters<float>() const;
template ParameterStore<double> Checkpoint::parameters<double>() const;

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  nlohmann::json header;
  header["version"] = checkpoint.version;
  header["metadata"] = nlohmann::json::parse(checkpoint.metadata_json);
  header["entries"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& e : checkpoint.entries) {
    if (e.raw.size() != element_count(e.shape) * element_bytes(e.precision)) {
      throw DataError("checkpoint entry '" + e.name + "' payload does not match its shape");
    }
    header["entries"].push_back({{"name", e.name},
                                 {"shape", e.shape},
                                 {"precision", to_string(e.precision)},
                                 {"offset", offset},
                                 {"bytes", e.raw.size()}});
    offset += e.raw.size();
  }
  const std::string text = header.dump();
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, checkpoint.version);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& e : checkpoint.entries) {
    out.write(reinterpret_cast<const char*>(e.raw.data()), static_cast<std::streamsize>(e.raw.size()));
  }
  if (!out) throw DataError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("checkpoint: bad magic");
  }
  Checkpoint cp;
  cp.version = get_le<std::uint32_t>(in);
  if (cp.version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(cp.version));
  }
  const auto header_len = get_le<std::uint64_t>(in);
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) throw DataError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: header is not valid JSON: ") + e.what());
  }
  cp.metadata_json = header.at("metadata").dump();
  for (const auto& je : header.at("entries")) {
    CheckpointEntry e;
    e.name = je.at("name").get<std::string>();
    e.shape = je.at("shape").get<Shape>();
    e.precision = precision_from_string(je.at("precision").get<std::string>());
    const auto bytes = je.at("bytes").get<std::uint64_t>();
    if (bytes != element_count(e.shape) * element_bytes(e.precision)) {
      throw DataError("checkpoint entry '" + e.name + "' has inconsistent size");
    }
    e.raw.resize(bytes);
    if (!in.read(reinterpret_cast<char*>(e.raw.data()), static_cast<std::streamsize>(bytes))) {
      throw DataError("checkpoint: truncated payload for '" + e.name + "'");
    }
    cp.entries.push_back(std::move(e));
  }
  return cp;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_checkpoint(checkpoint, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace hmer::tensor
