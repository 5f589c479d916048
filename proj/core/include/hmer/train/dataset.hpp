#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hmer/graph/modeled_graph.hpp"
#include "hmer/ink/types.hpp"
#include "hmer/labels/label_graph.hpp"
#include "hmer/labels/vocabulary.hpp"

namespace hmer::train {

struct DatasetItem {
  ink::InkExpression ink;
  std::optional<labels::LabelGraph> labels;

  friend bool operator==(const DatasetItem&, const DatasetItem&) = default;
};

/// Packed file: magic "HMERPACK", u32 version, u64 record count, then one
/// (u64 offset, u64 length) index entry per record, then the records, each
/// a JSON object with id, strokes, annotation and LG text.
void write_dataset(const std::filesystem::path& path, std::span<const DatasetItem> items);
std::vector<DatasetItem> read_dataset(const std::filesystem::path& path);

/// Every *.inkml under `ink_dir` (sorted by name) with the same-stem .lg
/// file from `lg_dir` when present. Parse failures raise DataError naming
/// the file.
std::vector<DatasetItem> ingest_directory(const std::filesystem::path& ink_dir, const std::filesystem::path& lg_dir);

struct PreparedSet {
  std::vector<graph::GraphSample> samples;
  /// Index into the source items of each sample.
  std::vector<std::size_t> source;
  std::size_t dropped_relations = 0;
  std::size_t dropped_memberships = 0;
};

/// Builds graphs and ESLG ground truth. With `split`, each expression yields
/// its training sub-expressions; otherwise one full graph. Items without
/// labels raise DataError.
PreparedSet prepare(std::span<const DatasetItem> items, const graph::GraphConfig& config,
                    const labels::Vocabulary& vocab, bool split);

}  // namespace hmer::train
