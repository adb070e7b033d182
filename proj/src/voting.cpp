#include "patchcert/voting.hpp"

#include <algorithm>

namespace patchcert {

Label argmax_label(const std::vector<std::size_t>& counts) {
  Label best = 0;
  for (Label y = 1; y < counts.size(); ++y) {
    if (counts[y] > counts[best]) best = y;
  }
  return best;
}

VoteTally tally_votes(std::vector<Label> votes, Label label_count) {
  VoteTally t;
  t.counts.assign(label_count, 0);
  for (Label v : votes) {
    if (v >= label_count) throw DomainError("vote " + std::to_string(v) + " outside label range");
    ++t.counts[v];
  }
  t.votes = std::move(votes);
  t.winner = argmax_label(t.counts);
  t.winner_count = t.counts[t.winner];
  for (Label y = 0; y < label_count; ++y) {
    if (y != t.winner) t.runner_up_count = std::max(t.runner_up_count, t.counts[y]);
  }
  return t;
}

VoteTally voting_tally(const Sample& x, const ClassifierHandle& f, const AblationSet& bands) {
  std::vector<Label> votes;
  votes.reserve(bands.size());
  for (const auto& b : bands.bands) votes.push_back(classify(f, apply_region(x, b)));
  return tally_votes(std::move(votes), f->label_count());
}

Label voting_predict(const Sample& x, const ClassifierHandle& f, const AblationSet& bands) {
  return voting_tally(x, f, bands).winner;
}

bool voting_certify(const VoteTally& tally, std::size_t delta) { return tally.margin() > 2 * delta; }

bool voting_certify(const Sample& x, const ClassifierHandle& f, const AblationSet& bands, std::size_t delta) {
  return voting_certify(voting_tally(x, f, bands), delta);
}

VotingDefender make_voting_defender(ClassifierHandle f, AblationSet bands, const PatchSet& patches) {
  const std::size_t delta = compute_delta(bands, patches);
  return {std::move(f), std::move(bands), delta};
}

}  // namespace patchcert
