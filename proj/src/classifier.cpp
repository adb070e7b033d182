#include "patchcert/classifier.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace patchcert {
namespace {

using nlohmann::json;

struct PixelKey {
  int width;
  int height;
  std::vector<Pixel> pixels;
  bool operator==(const PixelKey&) const = default;
};

// FNV-1a over the frame and pixel bytes.
std::size_t hash_pixels(int width, int height, const std::vector<Pixel>& pixels) noexcept {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(width));
  mix(static_cast<std::uint64_t>(height));
  for (Pixel p : pixels) mix(p);
  return static_cast<std::size_t>(h);
}

struct PixelKeyHash {
  std::size_t operator()(const PixelKey& k) const noexcept {
    return hash_pixels(k.width, k.height, k.pixels);
  }
};

PixelKey key_of(const Sample& x) { return {x.width(), x.height(), x.to_vector()}; }

void check_label(Label label, Label label_count, const std::string& context) {
  if (label >= label_count) {
    throw DomainError(context + ": label " + std::to_string(label) + " outside [0, " +
                      std::to_string(label_count) + ")");
  }
}

class TableClassifier final : public Classifier {
 public:
  TableClassifier(const std::vector<std::pair<Sample, Label>>& entries, Label default_label,
                  Label label_count)
      : default_(default_label), label_count_(label_count) {
    if (label_count_ == 0) throw DomainError("table classifier needs at least one label");
    check_label(default_label, label_count_, "table classifier default");
    for (const auto& [x, label] : entries) {
      check_label(label, label_count_, "table classifier entry");
      if (!frame_) {
        frame_ = {x.width(), x.height()};
      } else if (frame_->first != x.width() || frame_->second != x.height()) {
        throw DimensionError("table classifier entries have non-uniform dimensions");
      }
      auto [it, inserted] = table_.emplace(key_of(x), label);
      if (!inserted && it->second != label) {
        throw DomainError("table classifier: duplicate sample with conflicting labels " +
                          std::to_string(it->second) + " and " + std::to_string(label));
      }
    }
  }

  Label classify(const Sample& x) const override {
    if (frame_ && (frame_->first != x.width() || frame_->second != x.height())) {
      throw ClassifierError(ClassifierError::Kind::dimension,
                            "table classifier expects " + std::to_string(frame_->first) + "x" +
                                std::to_string(frame_->second) + " samples");
    }
    const auto it = table_.find(key_of(x));
    return it == table_.end() ? default_ : it->second;
  }
  Label label_count() const override { return label_count_; }
  std::string kind() const override { return "table"; }

 private:
  std::unordered_map<PixelKey, Label, PixelKeyHash> table_;
  std::optional<std::pair<int, int>> frame_;
  Label default_;
  Label label_count_;
};

class SyntheticClassifier final : public Classifier {
 public:
  enum class Formula { modsum, weighted, majority, constant };

  SyntheticClassifier(Formula formula, Label label_count, Label constant, std::string name)
      : formula_(formula), label_count_(label_count), constant_(constant), name_(std::move(name)) {}

  Label classify(const Sample& x) const override {
    switch (formula_) {
      case Formula::modsum: {
        std::uint64_t sum = 0;
        for (Pixel p : x.data()) sum += p;
        return static_cast<Label>(sum % label_count_);
      }
      case Formula::weighted: {
        std::uint64_t sum = 0;
        const auto data = x.data();
        for (std::size_t idx = 0; idx < data.size(); ++idx) sum += (idx + 1) * data[idx];
        return static_cast<Label>(sum % label_count_);
      }
      case Formula::majority: {
        std::vector<std::size_t> counts(static_cast<std::size_t>(x.alphabet()) + 1, 0);
        for (Pixel p : x.data()) ++counts[p];
        std::size_t best = 0;
        for (std::size_t v = 1; v < counts.size(); ++v) {
          if (counts[v] > 0 && (best == 0 || counts[v] > counts[best])) best = v;
        }
        return static_cast<Label>(best % label_count_);
      }
      case Formula::constant:
        return constant_;
    }
    return 0;
  }
  Label label_count() const override { return label_count_; }
  std::string kind() const override { return "synthetic:" + name_; }

 private:
  Formula formula_;
  Label label_count_;
  Label constant_;
  std::string name_;
};

class FunctionClassifier final : public Classifier {
 public:
  FunctionClassifier(std::function<Label(const Sample&)> fn, Label label_count, std::string kind)
      : fn_(std::move(fn)), label_count_(label_count), kind_(std::move(kind)) {}

  Label classify(const Sample& x) const override { return fn_(x); }
  Label label_count() const override { return label_count_; }
  std::string kind() const override { return kind_; }

 private:
  std::function<Label(const Sample&)> fn_;
  Label label_count_;
  std::string kind_;
};

class CachedClassifier final : public Classifier {
 public:
  CachedClassifier(ClassifierHandle inner, std::shared_ptr<QueryCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  Label classify(const Sample& x) const override {
    if (auto hit = cache_->lookup(x)) return *hit;
    const Label label = inner_->classify(x);
    cache_->store(x, label);
    return label;
  }
  Label label_count() const override { return inner_->label_count(); }
  std::string kind() const override { return inner_->kind(); }

 private:
  ClassifierHandle inner_;
  std::shared_ptr<QueryCache> cache_;
};

}  // namespace

Label classify(const ClassifierHandle& c, const Sample& x) {
  const Label label = c->classify(x);
  if (label >= c->label_count()) {
    throw ClassifierError(ClassifierError::Kind::label_range,
                          c->kind() + " returned label " + std::to_string(label) + " outside [0, " +
                              std::to_string(c->label_count()) + ")");
  }
  return label;
}

ClassifierHandle make_table_classifier(const std::vector<std::pair<Sample, Label>>& entries,
                                       Label default_label, Label label_count) {
  return std::make_shared<TableClassifier>(entries, default_label, label_count);
}

ClassifierHandle load_table_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open table classifier");
  json doc;
  try {
    doc = json::parse(in);
    const int width = doc.at("width").get<int>();
    const int height = doc.at("height").get<int>();
    const auto labels = doc.at("labels").get<Label>();
    const auto fallback = doc.at("default").get<Label>();
    const auto alphabet = doc.value("alphabet", 255);
    std::vector<std::pair<Sample, Label>> entries;
    for (const auto& e : doc.at("entries")) {
      const auto pixels = e.at("pixels").get<std::vector<int>>();
      std::vector<Pixel> px;
      px.reserve(pixels.size());
      for (int v : pixels) {
        if (v < 0 || v > alphabet) throw DomainError("pixel value " + std::to_string(v) + " out of range");
        px.push_back(static_cast<Pixel>(v));
      }
      entries.emplace_back(Sample(width, height, static_cast<Pixel>(alphabet), px),
                           e.at("label").get<Label>());
    }
    return make_table_classifier(entries, fallback, labels);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_table_classifier(const std::filesystem::path& path,
                           const std::vector<std::pair<Sample, Label>>& entries, Label default_label,
                           Label label_count) {
  nlohmann::ordered_json doc;
  int width = 0, height = 0, alphabet = 0;
  if (!entries.empty()) {
    width = entries.front().first.width();
    height = entries.front().first.height();
    alphabet = entries.front().first.alphabet();
  }
  doc["labels"] = label_count;
  doc["default"] = default_label;
  doc["width"] = width;
  doc["height"] = height;
  doc["alphabet"] = alphabet;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& [x, label] : entries) {
    std::vector<int> px(x.data().begin(), x.data().end());
    doc["entries"].push_back({{"pixels", px}, {"label", label}});
  }
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot write table classifier");
  out << doc.dump() << '\n';
}

ClassifierHandle make_synthetic_classifier(const std::string& formula, Label label_count) {
  using F = SyntheticClassifier::Formula;
  if (label_count == 0) throw DomainError("synthetic classifier needs at least one label");
  static const std::map<std::string, F> registry = {
      {"modsum", F::modsum}, {"weighted", F::weighted}, {"majority", F::majority}};
  if (auto it = registry.find(formula); it != registry.end()) {
    return std::make_shared<SyntheticClassifier>(it->second, label_count, 0, formula);
  }
  if (formula.rfind("constant=", 0) == 0) {
    const std::string arg = formula.substr(9);
    Label value = 0;
    try {
      std::size_t used = 0;
      value = static_cast<Label>(std::stoul(arg, &used));
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw DomainError("synthetic classifier: bad constant '" + arg + "'");
    }
    check_label(value, label_count, "synthetic constant");
    return std::make_shared<SyntheticClassifier>(F::constant, label_count, value, formula);
  }
  throw DomainError("unknown synthetic classifier '" + formula + "'");
}

ClassifierHandle make_function_classifier(std::function<Label(const Sample&)> fn, Label label_count,
                                          std::string kind) {
  return std::make_shared<FunctionClassifier>(std::move(fn), label_count, std::move(kind));
}

std::size_t QueryCache::KeyHash::operator()(const Key& k) const noexcept {
  return hash_pixels(k.width, k.height, k.pixels);
}

QueryCache::QueryCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, kShards)), shards_(kShards) {}

std::optional<Label> QueryCache::lookup(const Sample& x) const {
  Key key{x.width(), x.height(), x.to_vector()};
  const Shard& shard = shards_[KeyHash{}(key) % kShards];
  std::lock_guard lock(shard.mutex);
  if (auto it = shard.map.find(key); it != shard.map.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  return std::nullopt;
}

void QueryCache::store(const Sample& x, Label label) {
  Key key{x.width(), x.height(), x.to_vector()};
  Shard& shard = shards_[KeyHash{}(key) % kShards];
  std::lock_guard lock(shard.mutex);
  if (shard.map.size() >= capacity_ / kShards) shard.map.clear();
  shard.map.emplace(std::move(key), label);
}

void QueryCache::clear() {
  for (auto& shard : shards_) {
    std::lock_guard lock(shard.mutex);
    shard.map.clear();
  }
}

std::size_t QueryCache::size() const {
  std::size_t n = 0;
  for (const auto& shard : shards_) {
    std::lock_guard lock(shard.mutex);
    n += shard.map.size();
  }
  return n;
}

ClassifierHandle with_cache(ClassifierHandle inner, std::shared_ptr<QueryCache> cache) {
  return std::make_shared<CachedClassifier>(std::move(inner), std::move(cache));
}

ClassifierHandle make_classifier_from_spec(const std::string& spec, Label label_count,
                                           const ExternalOptions& external) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw DomainError("classifier spec '" + spec + "' must be table:PATH, synthetic:NAME or extern:CMDLINE");
  }
  const std::string scheme = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (scheme == "table") return load_table_classifier(arg);
  if (scheme == "synthetic") return make_synthetic_classifier(arg, label_count);
  if (scheme == "extern") return make_external_classifier(arg, label_count, external);
  throw DomainError("unknown classifier scheme '" + scheme + "'");
}

}  // namespace patchcert
