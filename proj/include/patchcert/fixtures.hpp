#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchcert/crosscert.hpp"
#include "patchcert/dataset.hpp"

namespace patchcert {

/// Contents of a table classifier, kept so a fixture can be both run in-process and exported.
struct TableSpec {
  std::vector<std::pair<Sample, Label>> entries;
  Label default_label = 0;
  Label label_count = 0;

  ClassifierHandle handle() const;
};

/// Small crafted configuration: geometry, samples and the two base models.
struct Scenario {
  std::string name;
  Geometry geometry;
  /// The defender mutation this scenario is built to expose, or none.
  Mutation mutation = Mutation::none;
  Dataset dataset;
  TableSpec h;
  TableSpec f;

  DefenderPair defenders(Mutation m = Mutation::none) const;
};

/// Names accepted by make_fixture: one per shipped mutation plus "vote-margin" and "mask-split".
std::vector<std::string> fixture_names();
/// Throws DomainError on an unknown name.
Scenario make_fixture(std::string_view name);
Scenario mutation_fixture(Mutation m);

/// Deterministic 6x6 samples over {1, 2} (A = 2) with a spread of densities of the value 2.
/// Labels are in {0, 1, 2}.
Dataset synthetic_suite(std::size_t count, std::uint32_t seed = 20240521);

/// Writes DIR/dataset/ (sgf files and labels.csv), DIR/h.json and DIR/f.json.
void export_scenario(const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace patchcert
