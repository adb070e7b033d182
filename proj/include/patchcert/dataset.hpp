#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "patchcert/core.hpp"

namespace patchcert {

struct LabeledSample {
  std::string id;  // sample file name relative to the dataset directory
  Sample sample;
  Label label = 0;
};

using Dataset = std::vector<LabeledSample>;

struct DatasetOptions {
  /// Benign samples normally never contain the sentinel; set to accept them anyway.
  bool allow_sentinel = false;
};

/// Parses one Simple Grid Format document. `origin` is used in error messages.
Sample parse_sgf(const std::string& text, const std::string& origin = "<memory>");
Sample read_sgf(const std::filesystem::path& path);

std::string format_sgf(const Sample& x);
void write_sgf(const std::filesystem::path& path, const Sample& x);

/// Loads a directory of .sgf files plus labels.csv, ordered by file name.
Dataset load_dataset(const std::filesystem::path& dir, const DatasetOptions& options = {});

/// Writes `dataset` as .sgf files and a labels.csv into `dir` (created if missing).
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace patchcert
