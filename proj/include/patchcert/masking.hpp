#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "patchcert/classifier.hpp"
#include "patchcert/geometry.hpp"
#include "patchcert/mutation.hpp"

namespace patchcert {

/// Masking-based recovery defender (R1), double-masking prediction.
struct MaskingDefender {
  ClassifierHandle model;  // base model h
  MaskSet masks;
};

/// Exit path of the double-masking prediction.
enum class MaskingCase {
  agreed = 1,     // Case I: every one-mask mutant agrees
  disagreed = 2,  // Case II: some first-round mask has a unanimous second round
  majority = 3,   // Case III: fall back to the first-round majority
};

std::string_view to_string(MaskingCase c);

struct MaskingOutcome {
  Label label = 0;
  bool warning = false;
  MaskingCase case_tag = MaskingCase::agreed;
  /// Case II: index of the first mask whose second round was unanimous.
  std::optional<std::size_t> consensus_mask;
  /// First-round labels h((J-m) ⊙ x), one per mask.
  std::vector<Label> first_round;
  /// Masks whose first-round label differs from the majority (M_min).
  std::vector<std::size_t> minority_masks;
};

/// Labels h((J - m_i - m_j) ⊙ x) for every ordered pair (i, j).
using DoubleMaskTable = Eigen::Array<Label, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Original double-masking prediction: the second round only visits minority masks, never warns.
MaskingOutcome predict_original(const Sample& x, const ClassifierHandle& h, const MaskSet& masks);

/// Revised prediction: the second round visits every mask and Case III raises a warning.
MaskingOutcome predict_revised(const Sample& x, const ClassifierHandle& h, const MaskSet& masks,
                               Mutation mutation = Mutation::none);

DoubleMaskTable double_masked_votes(const Sample& x, const ClassifierHandle& h, const MaskSet& masks);

/// Two-masking agreement: one label across the whole double-mask table (c1).
bool tma_check(const DoubleMaskTable& table);
bool tma_check(const Sample& x, const ClassifierHandle& h, const MaskSet& masks);

inline MaskingOutcome predict_original(const Sample& x, const MaskingDefender& r1) {
  return predict_original(x, r1.model, r1.masks);
}
inline MaskingOutcome predict_revised(const Sample& x, const MaskingDefender& r1,
                                      Mutation mutation = Mutation::none) {
  return predict_revised(x, r1.model, r1.masks, mutation);
}

}  // namespace patchcert
