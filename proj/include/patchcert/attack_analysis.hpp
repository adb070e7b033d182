#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string_view>

#include "patchcert/masking.hpp"
#include "patchcert/voting.hpp"

namespace patchcert {

/// (patch region, target label) pair.
struct AttackConfiguration {
  std::size_t patch_index = 0;
  Label target = 0;

  auto operator<=>(const AttackConfiguration&) const = default;
};

enum class DefenderRole { r1, r2 };
std::string_view to_string(DefenderRole role);

/// Every attack configuration not excluded by a defender's necessary attack condition,
/// plus (p, benign label) for every patch p.
struct AttackSet {
  DefenderRole owner = DefenderRole::r1;
  std::set<AttackConfiguration> members;

  bool contains(std::size_t patch, Label target) const { return members.contains({patch, target}); }
  std::size_t size() const noexcept { return members.size(); }
};

/// Precomputed view of the masking defender on a benign sample.
struct MaskingAnalysis {
  DoubleMaskTable table;
  Label benign_label = 0;  // g1(x) from the revised prediction
  /// union_contains[p](i, j): patch p lies inside m_i + m_j.
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> union_contains;
};

MaskingAnalysis analyze_masking(const Sample& x, const MaskingDefender& r1, const PatchSet& patches,
                                Label g1_of_x);

/// NAC_masking: some pair (m1, m2), possibly m1 = m2, has p inside m1 + m2 and a
/// double-masked label equal to y_a, which differs from g1(x).
bool nac_masking(const MaskingAnalysis& analysis, std::size_t patch_index, Label y_a);
bool nac_masking(const Sample& x, const BinaryRegion& p, Label y_a, const ClassifierHandle& h,
                 const MaskSet& masks, Label g1_of_x);

/// Precomputed view of the voting defender on a benign sample.
struct VotingAnalysis {
  VoteTally tally;
  Label benign_label = 0;  // g2(x)
  /// overlap[p][b]: band b overlaps patch p.
  std::vector<std::vector<bool>> overlap;
};

VotingAnalysis analyze_voting(const Sample& x, const VotingDefender& r2, const PatchSet& patches);

/// NAC_voting: |outside votes for y_a| + |bands overlapping p| >= |outside votes for g2(x)|.
bool nac_voting(const VotingAnalysis& analysis, std::size_t patch_index, Label y_a,
                Mutation mutation = Mutation::none);
bool nac_voting(const Sample& x, const BinaryRegion& p, Label y_a, const ClassifierHandle& f,
                const AblationSet& bands, Label g2_of_x, Mutation mutation = Mutation::none);

AttackSet build_att_set_r1(const MaskingAnalysis& analysis, const PatchSet& patches, Label label_count);
AttackSet build_att_set_r2(const VotingAnalysis& analysis, const PatchSet& patches, Label label_count,
                           Mutation mutation = Mutation::none);

/// True iff the two sets share no pair, or every shared pair targets g1(x).
bool att_intersection_ok(const AttackSet& s1, const AttackSet& s2, Label g1_of_x);

}  // namespace patchcert
