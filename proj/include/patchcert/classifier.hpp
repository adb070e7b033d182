#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patchcert/core.hpp"

namespace patchcert {

/// Label oracle used as the base model of either defender.
/// Implementations must be total and deterministic over samples of their frame.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Label classify(const Sample& x) const = 0;
  virtual Label label_count() const = 0;
  virtual std::string kind() const = 0;
};

using ClassifierHandle = std::shared_ptr<const Classifier>;

/// Failures of a classifier backend. `kind()` separates transport faults from dimension faults.
class ClassifierError : public Error {
 public:
  enum class Kind { spawn, timeout, malformed_response, id_mismatch, handshake, peer_exited, dimension, label_range };

  ClassifierError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

Label classify(const ClassifierHandle& c, const Sample& x);

/// Exact pixel match lookup with a default label.
ClassifierHandle make_table_classifier(const std::vector<std::pair<Sample, Label>>& entries,
                                       Label default_label, Label label_count);

/// Reads the JSON table format: {"labels", "default", "width", "height", "entries": [{"pixels", "label"}]}.
ClassifierHandle load_table_classifier(const std::filesystem::path& path);
void save_table_classifier(const std::filesystem::path& path,
                           const std::vector<std::pair<Sample, Label>>& entries, Label default_label,
                           Label label_count);

/// Registered pure formulas over pixel values:
///   modsum      (sum of pixels) mod L
///   weighted    (sum of (i*w + j + 1) * pixel_ij) mod L
///   majority    most frequent non-sentinel value (ties to the smaller value) mod L, 0 if all removed
///   constant=N  always N
ClassifierHandle make_synthetic_classifier(const std::string& formula, Label label_count);

/// Wraps an arbitrary callable. Used for in-process models and test fixtures.
ClassifierHandle make_function_classifier(std::function<Label(const Sample&)> fn, Label label_count,
                                          std::string kind = "function");

struct ExternalOptions {
  std::chrono::milliseconds timeout{5000};
  /// When set, samples of any other frame are rejected before hitting the peer.
  std::optional<std::pair<int, int>> expected_frame;
};

/// Spawns `command` through /bin/sh and speaks the newline-delimited JSON protocol on its
/// stdin/stdout. One request is in flight at a time; concurrent callers are serialized.
ClassifierHandle make_external_classifier(const std::string& command, Label label_count,
                                          const ExternalOptions& options = {});

/// Memoizes labels by exact pixel content. Thread-safe. When the entry count reaches
/// `capacity` the cache is emptied and starts over.
class QueryCache {
 public:
  explicit QueryCache(std::size_t capacity = std::size_t{1} << 20);

  std::optional<Label> lookup(const Sample& x) const;
  void store(const Sample& x, Label label);
  void clear();

  std::uint64_t hits() const noexcept { return hits_.load(); }
  std::uint64_t misses() const noexcept { return misses_.load(); }
  std::size_t size() const;

 private:
  static constexpr std::size_t kShards = 16;
  struct Key {
    int width;
    int height;
    std::vector<Pixel> pixels;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_map<Key, Label, KeyHash> map;
  };

  std::size_t capacity_;
  std::vector<Shard> shards_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

/// A classifier that consults `cache` before delegating to `inner`.
ClassifierHandle with_cache(ClassifierHandle inner, std::shared_ptr<QueryCache> cache);

/// Parses `table:PATH`, `synthetic:NAME` or `extern:CMDLINE`.
ClassifierHandle make_classifier_from_spec(const std::string& spec, Label label_count,
                                           const ExternalOptions& external = {});

}  // namespace patchcert
