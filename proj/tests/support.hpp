#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "patchcert/classifier.hpp"
#include "patchcert/core.hpp"
#include "reference.hpp"

namespace support {

inline ref::Grid to_grid(const patchcert::Sample& x) {
  ref::Grid g(static_cast<std::size_t>(x.height()), std::vector<int>(static_cast<std::size_t>(x.width())));
  for (int r = 0; r < x.height(); ++r)
    for (int c = 0; c < x.width(); ++c) g[r][c] = x(r, c);
  return g;
}

inline patchcert::Sample to_sample(const ref::Grid& g, patchcert::Pixel alphabet) {
  std::vector<patchcert::Pixel> px;
  for (const auto& row : g)
    for (int v : row) px.push_back(static_cast<patchcert::Pixel>(v));
  return patchcert::Sample(static_cast<int>(g[0].size()), static_cast<int>(g.size()), alphabet, px);
}

/// Lets the reference defenders query a library classifier as an opaque model.
inline ref::Model model_of(patchcert::ClassifierHandle c, patchcert::Pixel alphabet) {
  return [c, alphabet](const ref::Grid& g) { return static_cast<int>(c->classify(to_sample(g, alphabet))); };
}

inline patchcert::Sample random_sample(std::mt19937& rng, int w, int h, patchcert::Pixel alphabet, int lo = 1) {
  std::vector<patchcert::Pixel> px(static_cast<std::size_t>(w * h));
  for (auto& p : px) p = static_cast<patchcert::Pixel>(lo + static_cast<int>(rng() % (alphabet - lo + 1)));
  return patchcert::Sample(w, h, alphabet, px);
}

/// Deterministic pseudo-random model: hash of the pixels mod L, biased towards label 0 so
/// tables mix agreement and disagreement.
inline patchcert::ClassifierHandle hashed_model(std::uint32_t salt, patchcert::Label labels) {
  return patchcert::make_function_classifier(
      [salt, labels](const patchcert::Sample& x) {
        std::uint32_t h = 2166136261u ^ salt;
        for (patchcert::Pixel p : x.data()) h = (h ^ p) * 16777619u;
        h ^= h >> 13;
        return (h % 4 == 0) ? static_cast<patchcert::Label>((h >> 4) % labels) : patchcert::Label{0};
      },
      labels, "hashed");
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("patchcert_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace support
