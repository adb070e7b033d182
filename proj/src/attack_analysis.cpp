#include "patchcert/attack_analysis.hpp"

#include <algorithm>

namespace patchcert {

std::string_view to_string(DefenderRole role) { return role == DefenderRole::r1 ? "R1" : "R2"; }

MaskingAnalysis analyze_masking(const Sample& x, const MaskingDefender& r1, const PatchSet& patches,
                                Label g1_of_x) {
  MaskingAnalysis a;
  a.table = double_masked_votes(x, r1.model, r1.masks);
  a.benign_label = g1_of_x;
  const auto n = static_cast<Eigen::Index>(r1.masks.size());
  a.union_contains.reserve(patches.size());
  for (const auto& p : patches.regions) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> inside(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& mi = r1.masks[static_cast<std::size_t>(i)];
        const auto& mj = r1.masks[static_cast<std::size_t>(j)];
        inside(i, j) = p.inside(region_add(mi, mj));
      }
    }
    a.union_contains.push_back(std::move(inside));
  }
  return a;
}

bool nac_masking(const MaskingAnalysis& a, std::size_t patch_index, Label y_a) {
  if (y_a == a.benign_label) return false;
  return (a.union_contains.at(patch_index) && (a.table == y_a)).any();
}

bool nac_masking(const Sample& x, const BinaryRegion& p, Label y_a, const ClassifierHandle& h,
                 const MaskSet& masks, Label g1_of_x) {
  PatchSet single{x.width(), x.height(), 0, {p}};
  return nac_masking(analyze_masking(x, MaskingDefender{h, masks}, single, g1_of_x), 0, y_a);
}

VotingAnalysis analyze_voting(const Sample& x, const VotingDefender& r2, const PatchSet& patches) {
  VotingAnalysis a;
  a.tally = voting_tally(x, r2.model, r2.ablations);
  a.benign_label = a.tally.winner;
  a.overlap.reserve(patches.size());
  for (const auto& p : patches.regions) {
    std::vector<bool> row(r2.ablations.size(), false);
    for (std::size_t b : overlapping_bands(r2.ablations, p)) row[b] = true;
    a.overlap.push_back(std::move(row));
  }
  return a;
}

bool nac_voting(const VotingAnalysis& a, std::size_t patch_index, Label y_a, Mutation mutation) {
  const auto& overlap = a.overlap.at(patch_index);
  std::size_t outside_target = 0;
  std::size_t outside_benign = 0;
  std::size_t overlapping = 0;
  for (std::size_t b = 0; b < overlap.size(); ++b) {
    if (overlap[b]) {
      ++overlapping;
      continue;
    }
    if (a.tally.votes[b] == y_a) ++outside_target;
    if (a.tally.votes[b] == a.benign_label) ++outside_benign;
  }
  const std::size_t attacker = outside_target + (mutation == Mutation::voting_nac_drop_overlap ? 0 : overlapping);
  if (mutation == Mutation::voting_nac_strict) return attacker > outside_benign;
  return attacker >= outside_benign;
}

bool nac_voting(const Sample& x, const BinaryRegion& p, Label y_a, const ClassifierHandle& f,
                const AblationSet& bands, Label g2_of_x, Mutation mutation) {
  PatchSet single{x.width(), x.height(), 0, {p}};
  VotingAnalysis a = analyze_voting(x, VotingDefender{f, bands, 0}, single);
  a.benign_label = g2_of_x;
  return nac_voting(a, 0, y_a, mutation);
}

AttackSet build_att_set_r1(const MaskingAnalysis& a, const PatchSet& patches, Label label_count) {
  AttackSet set{DefenderRole::r1, {}};
  for (std::size_t p = 0; p < patches.size(); ++p) {
    set.members.insert({p, a.benign_label});
    for (Label y = 0; y < label_count; ++y) {
      if (nac_masking(a, p, y)) set.members.insert({p, y});
    }
  }
  return set;
}

AttackSet build_att_set_r2(const VotingAnalysis& a, const PatchSet& patches, Label label_count,
                           Mutation mutation) {
  AttackSet set{DefenderRole::r2, {}};
  for (std::size_t p = 0; p < patches.size(); ++p) {
    set.members.insert({p, a.benign_label});
    for (Label y = 0; y < label_count; ++y) {
      if (nac_voting(a, p, y, mutation)) set.members.insert({p, y});
    }
  }
  return set;
}

bool att_intersection_ok(const AttackSet& s1, const AttackSet& s2, Label g1_of_x) {
  return std::all_of(s1.members.begin(), s1.members.end(), [&](const AttackConfiguration& c) {
    return !s2.members.contains(c) || c.target == g1_of_x;
  });
}

}  // namespace patchcert
