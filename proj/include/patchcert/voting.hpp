#pragma once

#include <cstddef>
#include <vector>

#include "patchcert/classifier.hpp"
#include "patchcert/geometry.hpp"

namespace patchcert {

/// Voting-based recovery defender over column ablations (R2).
struct VotingDefender {
  ClassifierHandle model;  // base model f
  AblationSet ablations;
  std::size_t delta = 0;
};

struct VoteTally {
  std::vector<Label> votes;          // one per band, in ablation-set order
  std::vector<std::size_t> counts;   // per label
  Label winner = 0;
  std::size_t winner_count = 0;
  std::size_t runner_up_count = 0;

  std::size_t margin() const noexcept { return winner_count - runner_up_count; }
};

/// Majority over per-label counts; ties go to the smallest label id.
Label argmax_label(const std::vector<std::size_t>& counts);

/// Builds counts/winner/runner-up from per-band votes.
VoteTally tally_votes(std::vector<Label> votes, Label label_count);

VoteTally voting_tally(const Sample& x, const ClassifierHandle& f, const AblationSet& bands);

/// g2
Label voting_predict(const Sample& x, const ClassifierHandle& f, const AblationSet& bands);
inline Label voting_predict(const Sample& x, const VotingDefender& r2) {
  return voting_predict(x, r2.model, r2.ablations);
}

/// c2: winner count beats every other label by more than 2*delta.
bool voting_certify(const VoteTally& tally, std::size_t delta);
bool voting_certify(const Sample& x, const ClassifierHandle& f, const AblationSet& bands, std::size_t delta);
inline bool voting_certify(const Sample& x, const VotingDefender& r2) {
  return voting_certify(x, r2.model, r2.ablations, r2.delta);
}

/// v2: the voting defender never warns.
constexpr bool voting_warn(const Sample&) noexcept { return false; }

VotingDefender make_voting_defender(ClassifierHandle f, AblationSet bands, const PatchSet& patches);

}  // namespace patchcert
