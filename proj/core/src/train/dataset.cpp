#include "hmer/train/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hmer/error.hpp"
#include "hmer/ink/inkml.hpp"
#include "hmer/ink/lg_reader.hpp"
#include "json.hpp"

namespace hmer::train {
namespace {

constexpr char kMagic[8] = {'H', 'M', 'E', 'R', 'P', 'A', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U take(const std::string& data, std::size_t& pos) {
  if (pos + sizeof(U) > data.size()) throw DataError("truncated dataset file");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
  pos += sizeof(U);
  return value;
}

std::string encode(const DatasetItem& item) {
  nlohmann::ordered_json j;
  j["id"] = item.ink.id;
  auto strokes = nlohmann::json::array();
  for (const auto& s : item.ink.strokes) {
    auto flat = nlohmann::json::array();
    for (const auto& p : s.points) {
      flat.push_back(p.x);
      flat.push_back(p.y);
    }
    strokes.push_back(std::move(flat));
  }
  j["strokes"] = std::move(strokes);
  j["annotation"] = item.ink.annotation ? nlohmann::json(*item.ink.annotation) : nlohmann::json();
  j["lg"] = item.labels ? nlohmann::json(labels::serialize_lg(*item.labels)) : nlohmann::json();
  return j.dump();
}

DatasetItem decode(const std::string& text) {
  DatasetItem item;
  try {
    const auto j = nlohmann::json::parse(text);
    item.ink.id = j.at("id").get<std::string>();
    for (const auto& flat : j.at("strokes")) {
      ink::Stroke s;
      s.index = item.ink.strokes.size();
      if (flat.size() % 2 != 0 || flat.empty()) throw DataError("record '" + item.ink.id + "' has a malformed stroke");
      for (std::size_t k = 0; k < flat.size(); k += 2) s.points.push_back({flat[k].get<double>(), flat[k + 1].get<double>()});
      item.ink.strokes.push_back(std::move(s));
    }
    if (!j.at("annotation").is_null()) item.ink.annotation = j["annotation"].get<std::string>();
    if (!j.at("lg").is_null()) item.labels = ink::parse_lg(j["lg"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset record: ") + e.what());
  }
  return item;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void write_dataset(const std::filesystem::path& path, std::span<const DatasetItem> items) {
  std::vector<std::string> records;
  records.reserve(items.size());
  for (const auto& item : items) records.push_back(encode(item));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, records.size());
  std::uint64_t offset = sizeof kMagic + 4 + 8 + 16 * records.size();
  for (const auto& r : records) {
    put<std::uint64_t>(out, offset);
    put<std::uint64_t>(out, r.size());
    offset += r.size();
  }
  for (const auto& r : records) out.write(r.data(), static_cast<std::streamsize>(r.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<DatasetItem> read_dataset(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  if (data.size() < sizeof kMagic || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0)
    throw DataError(path.string() + " is not a packed dataset");
  std::size_t pos = sizeof kMagic;
  const auto version = take<std::uint32_t>(data, pos);
  if (version != kVersion) throw DataError("unsupported dataset version " + std::to_string(version));
  const auto count = take<std::uint64_t>(data, pos);
  if (count > data.size() / 16) throw DataError("corrupt dataset index in " + path.string());
  std::vector<DatasetItem> items;
  items.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto offset = take<std::uint64_t>(data, pos);
    const auto length = take<std::uint64_t>(data, pos);
    if (offset > data.size() || length > data.size() - offset) throw DataError("corrupt dataset index in " + path.string());
    items.push_back(decode(data.substr(offset, length)));
  }
  return items;
}

std::vector<DatasetItem> ingest_directory(const std::filesystem::path& ink_dir, const std::filesystem::path& lg_dir) {
  if (!std::filesystem::is_directory(ink_dir)) throw DataError(ink_dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(ink_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".inkml") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<DatasetItem> items;
  for (const auto& file : files) {
    DatasetItem item;
    try {
      item.ink = ink::parse_inkml(slurp(file), file.stem().string());
      const auto lg = lg_dir / (file.stem().string() + ".lg");
      if (std::filesystem::exists(lg)) item.labels = ink::parse_lg(slurp(lg));
    } catch (const Error& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    if (item.labels && item.labels->size() != item.ink.strokes.size())
      throw DataError(file.string() + ": " + std::to_string(item.ink.strokes.size()) + " traces but the label graph has " +
                      std::to_string(item.labels->size()) + " strokes");
    items.push_back(std::move(item));
  }
  return items;
}

PreparedSet prepare(std::span<const DatasetItem> items, const graph::GraphConfig& config,
                    const labels::Vocabulary& vocab, bool split) {
  PreparedSet out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& item = items[k];
    if (!item.labels) throw DataError("expression '" + item.ink.id + "' has no labels");
    if (item.labels->size() != item.ink.strokes.size())
      throw DataError("expression '" + item.ink.id + "' has " + std::to_string(item.ink.strokes.size()) +
                      " strokes but " + std::to_string(item.labels->size()) + " labeled strokes");
    const auto local = graph::build_local_graph(item.ink, config);
    auto conversion = labels::to_eslg(*item.labels, local.adjacency, vocab);
    out.dropped_relations += conversion.dropped_relations;
    out.dropped_memberships += conversion.dropped_memberships;
    if (split) {
      for (auto& s : graph::split_subexpressions(local, conversion.eslg, config, vocab)) {
        out.samples.push_back(std::move(s));
        out.source.push_back(k);
      }
    } else {
      out.samples.push_back(graph::full_sample(local, conversion.eslg, config));
      out.source.push_back(k);
    }
  }
  return out;
}

}  // namespace hmer::train
