#include "patchcert/fixtures.hpp"

#include <cstdio>
#include <random>

namespace patchcert {

ClassifierHandle TableSpec::handle() const { return make_table_classifier(entries, default_label, label_count); }

DefenderPair Scenario::defenders(Mutation m) const { return make_defender_pair(geometry, h.handle(), f.handle(), m); }

namespace {

constexpr Pixel kA = 2;

Sample with_pixel(const Sample& x, int row, int col, Pixel v) {
  PixelArray px = x.pixels();
  px(row, col) = v;
  return Sample(std::move(px), x.alphabet());
}

Sample band_view(const Sample& x, const AblationSet& bands, std::size_t i) { return apply_region(x, bands[i]); }

Sample masked(const Sample& x, const MaskSet& masks, std::size_t a) { return remove_region(x, masks[a]); }

Sample masked(const Sample& x, const MaskSet& masks, std::size_t a, std::size_t b) {
  return remove_region(remove_region(x, masks[a]), masks[b]);
}

// 6x6 frame, 1x1 patches, 2x2 grid of 3x3 quadrant masks (m0 top-left, m1 top-right,
// m2 bottom-left, m3 bottom-right), single-column bands.
Scenario small_grid(std::string name, Mutation m) {
  Scenario s;
  s.name = std::move(name);
  s.geometry = Geometry{6, 6, 1, 2, 1};
  s.mutation = m;
  s.h.label_count = 3;
  s.f.label_count = 3;
  return s;
}

// g2(x) = 1 from a 4-2 split. Writing 2 at (0,0) flips band 0 and leaves a 3-3 tie that
// resolves to label 0. The attack only succeeds thanks to the band it overlaps.
Scenario voting_tie(Mutation m) {
  Scenario s = small_grid(std::string(to_string(m)), m);
  const Sample x = Sample::filled(6, 6, kA, 1);
  const Sample attacked = with_pixel(x, 0, 0, 2);
  const AblationSet bands = build_ablation_set(6, 6, 1);
  s.f.default_label = 1;
  s.f.entries = {{band_view(x, bands, 4), 0}, {band_view(x, bands, 5), 0}, {band_view(attacked, bands, 0), 0}};
  s.dataset = {{"tie.sgf", x, 1}};
  return s;
}

// x satisfies no TMA but is c_d-certified through disjoint attack sets. Writing 2 at (0,0)
// pushes the revised prediction into Case III with label 1, which g2 then agrees with.
Scenario silent_case3() {
  Scenario s = small_grid("revised-skip-case3-warning", Mutation::revised_skip_case3_warning);
  const Sample x = Sample::filled(6, 6, kA, 1);
  const Sample attacked = with_pixel(x, 0, 0, 2);
  const MaskSet masks = build_mask_set(6, 6, 1, 2);
  const AblationSet bands = build_ablation_set(6, 6, 1);
  s.h.default_label = 0;
  s.h.entries = {{masked(x, masks, 0, 1), 2},
                 {masked(attacked, masks, 1), 1},
                 {masked(attacked, masks, 2), 1},
                 {masked(attacked, masks, 3), 1}};
  s.f.default_label = 0;
  s.f.entries = {{band_view(x, bands, 3), 1},
                 {band_view(x, bands, 4), 1},
                 {band_view(x, bands, 5), 1},
                 {band_view(attacked, bands, 0), 1}};
  s.dataset = {{"silent.sgf", x, 0}};
  return s;
}

// Constant models except one first-round mutant of the attacked sample. Only the minority
// mask gets a second round, and it disagrees, so the mutated prediction lands in Case III.
Scenario minority_loop() {
  Scenario s = small_grid("revised-iterate-minority", Mutation::revised_iterate_minority);
  const Sample x = Sample::filled(6, 6, kA, 1);
  const Sample attacked = with_pixel(x, 0, 0, 2);
  const MaskSet masks = build_mask_set(6, 6, 1, 2);
  s.h.default_label = 0;
  s.h.entries = {{masked(attacked, masks, 1), 1}};
  s.f.default_label = 0;
  s.dataset = {{"minority.sgf", x, 0}};
  return s;
}

// Labels: 0 panda, 1 cat, 2 dog.
Scenario vote_margin() {
  Scenario s;
  s.name = "vote-margin";
  s.geometry = Geometry{5, 5, 2, 2, 1};
  s.h.label_count = 3;
  s.f.label_count = 3;
  const Sample x = Sample::filled(5, 5, kA, 1);
  const AblationSet bands = build_ablation_set(5, 5, 1);
  const PatchSet patches = build_patch_set(5, 5, 2);
  const std::vector<Pixel> cat(4, 2);
  const Sample attacked = overwrite_patch(x, patches[0], cat);
  s.f.default_label = 0;
  s.f.entries = {{band_view(attacked, bands, 0), 1}, {band_view(attacked, bands, 1), 1}};
  s.dataset = {{"benign.sgf", x, 0}, {"patched.sgf", attacked, 0}};
  return s;
}

// First round: cat, panda, cat, dog. Every second-round mutant of the top-right mask is
// panda, so the prediction is panda via Case II.
Scenario mask_split() {
  Scenario s = small_grid("mask-split", Mutation::none);
  const Sample x = Sample::filled(6, 6, kA, 1);
  const MaskSet masks = build_mask_set(6, 6, 1, 2);
  s.h.default_label = 1;
  s.h.entries.push_back({masked(x, masks, 3), 2});
  for (std::size_t j = 0; j < masks.size(); ++j) s.h.entries.push_back({masked(x, masks, 1, j), 0});
  s.f.default_label = 0;
  s.dataset = {{"split.sgf", x, 0}};
  return s;
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (Mutation m : all_mutations()) out.emplace_back(to_string(m));
  out.emplace_back("vote-margin");
  out.emplace_back("mask-split");
  return out;
}

Scenario mutation_fixture(Mutation m) {
  switch (m) {
    case Mutation::voting_nac_drop_overlap:
    case Mutation::voting_nac_strict: return voting_tie(m);
    case Mutation::revised_skip_case3_warning: return silent_case3();
    case Mutation::revised_iterate_minority: return minority_loop();
    case Mutation::none: break;
  }
  throw DomainError("no fixture for mutation 'none'");
}

Scenario make_fixture(std::string_view name) {
  if (name == "vote-margin") return vote_margin();
  if (name == "mask-split") return mask_split();
  if (auto m = parse_mutation(name); m && *m != Mutation::none) return mutation_fixture(*m);
  throw DomainError("unknown fixture '" + std::string(name) + "'");
}

Dataset synthetic_suite(std::size_t count, std::uint32_t seed) {
  // Per-mille chance of a 2, cycled so the suite spans flat, mixed and near-balanced samples.
  static constexpr unsigned kDensity[] = {0, 100, 250, 400, 480, 500, 520, 600, 750, 900, 1000};
  std::mt19937 rng(seed);
  Dataset out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned density = kDensity[i % std::size(kDensity)];
    std::vector<Pixel> px(36);
    std::size_t twos = 0;
    for (auto& p : px) {
      p = rng() % 1000 < density ? 2 : 1;
      twos += p == 2;
    }
    Label label = twos * 2 > px.size() ? 2 : 1;
    if (i % 5 == 4) label = 0;
    char id[32];
    std::snprintf(id, sizeof id, "s%03zu.sgf", i);
    out.push_back({id, Sample(6, 6, kA, px), label});
  }
  return out;
}

void export_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_dataset(dir / "dataset", scenario.dataset);
  save_table_classifier(dir / "h.json", scenario.h.entries, scenario.h.default_label, scenario.h.label_count);
  save_table_classifier(dir / "f.json", scenario.f.entries, scenario.f.default_label, scenario.f.label_count);
}

}  // namespace patchcert
