#include "patchcert/masking.hpp"

#include "patchcert/voting.hpp"

namespace patchcert {
namespace {

struct SecondRound {
  Label majority = 0;
  bool unanimous = false;
};

SecondRound second_round(const Sample& first_masked, const ClassifierHandle& h, const MaskSet& masks) {
  std::vector<std::size_t> counts(h->label_count(), 0);
  std::size_t distinct = 0;
  for (const auto& m : masks.masks) {
    if (counts[classify(h, remove_region(first_masked, m))]++ == 0) ++distinct;
  }
  return {argmax_label(counts), distinct == 1};
}

MaskingOutcome run_double_masking(const Sample& x, const ClassifierHandle& h, const MaskSet& masks,
                                  bool visit_all_masks, bool warn_on_majority) {
  if (masks.size() == 0) throw GeometryError("double masking needs a non-empty mask set");
  MaskingOutcome out;
  std::vector<Sample> first_masked;
  first_masked.reserve(masks.size());
  std::vector<std::size_t> counts(h->label_count(), 0);
  for (const auto& m : masks.masks) {
    first_masked.push_back(remove_region(x, m));
    const Label y = classify(h, first_masked.back());
    out.first_round.push_back(y);
    ++counts[y];
  }
  const Label majority = argmax_label(counts);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (out.first_round[i] != majority) out.minority_masks.push_back(i);
  }

  if (out.minority_masks.empty()) {
    out.label = majority;
    out.case_tag = MaskingCase::agreed;
    return out;
  }

  const auto try_mask = [&](std::size_t i) {
    const SecondRound r = second_round(first_masked[i], h, masks);
    if (!r.unanimous) return false;
    out.label = r.majority;
    out.case_tag = MaskingCase::disagreed;
    out.consensus_mask = i;
    return true;
  };
  if (visit_all_masks) {
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (try_mask(i)) return out;
    }
  } else {
    for (std::size_t i : out.minority_masks) {
      if (try_mask(i)) return out;
    }
  }

  out.label = majority;
  out.case_tag = MaskingCase::majority;
  out.warning = warn_on_majority;
  return out;
}

}  // namespace

std::string_view to_string(MaskingCase c) {
  switch (c) {
    case MaskingCase::agreed:
      return "I";
    case MaskingCase::disagreed:
      return "II";
    case MaskingCase::majority:
      return "III";
  }
  return "?";
}

MaskingOutcome predict_original(const Sample& x, const ClassifierHandle& h, const MaskSet& masks) {
  return run_double_masking(x, h, masks, /*visit_all_masks=*/false, /*warn_on_majority=*/false);
}

MaskingOutcome predict_revised(const Sample& x, const ClassifierHandle& h, const MaskSet& masks,
                               Mutation mutation) {
  return run_double_masking(x, h, masks, mutation != Mutation::revised_iterate_minority,
                            mutation != Mutation::revised_skip_case3_warning);
}

DoubleMaskTable double_masked_votes(const Sample& x, const ClassifierHandle& h, const MaskSet& masks) {
  const auto n = static_cast<Eigen::Index>(masks.size());
  DoubleMaskTable table(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample once = remove_region(x, masks.masks[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      table(i, j) = classify(h, remove_region(once, masks.masks[static_cast<std::size_t>(j)]));
    }
  }
  return table;
}

bool tma_check(const DoubleMaskTable& table) {
  return table.size() > 0 && (table == table(0, 0)).all();
}

bool tma_check(const Sample& x, const ClassifierHandle& h, const MaskSet& masks) {
  return tma_check(double_masked_votes(x, h, masks));
}

}  // namespace patchcert
