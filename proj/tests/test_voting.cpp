#include <gtest/gtest.h>

#include <random>

#include "patchcert/fixtures.hpp"
#include "patchcert/voting.hpp"
#include "support.hpp"

using namespace patchcert;

TEST(Argmax, TiesGoToSmallestLabel) {
  EXPECT_EQ(argmax_label({2, 3, 3}), 1u);
  EXPECT_EQ(argmax_label({1, 1, 1}), 0u);
  EXPECT_EQ(argmax_label({0, 0, 4}), 2u);
}

TEST(Tally, CountsAndMargin) {
  const VoteTally t = tally_votes({0, 0, 0, 0, 0, 0, 0, 1, 1, 1}, 2);
  EXPECT_EQ(t.winner, 0u);
  EXPECT_EQ(t.winner_count, 7u);
  EXPECT_EQ(t.runner_up_count, 3u);
  EXPECT_EQ(t.margin(), 4u);
  EXPECT_FALSE(voting_certify(t, 2));  // 7 - 3 > 4 fails
  EXPECT_TRUE(voting_certify(tally_votes({0, 0, 0, 0, 0, 0, 0, 0, 1, 1}, 2), 2));
  EXPECT_THROW(tally_votes({0, 3}, 3), DomainError);
}

TEST(Tally, TieFavoursSmallerLabel) {
  const VoteTally t = tally_votes({2, 1, 2, 1}, 3);
  EXPECT_EQ(t.winner, 1u);
  EXPECT_EQ(t.margin(), 0u);
}

TEST(Voting, VoteMarginArithmetic) {
  const Scenario s = make_fixture("vote-margin");
  const DefenderPair d = s.defenders();
  EXPECT_EQ(d.r2.delta, 2u);
  const VoteTally benign = voting_tally(s.dataset[0].sample, d.r2.model, d.r2.ablations);
  EXPECT_EQ(benign.winner_count, 5u);
  EXPECT_EQ(benign.runner_up_count, 0u);
  EXPECT_TRUE(voting_certify(benign, d.r2.delta));
  const VoteTally attacked = voting_tally(s.dataset[1].sample, d.r2.model, d.r2.ablations);
  EXPECT_EQ(attacked.counts[0], 3u);
  EXPECT_EQ(attacked.counts[1], 2u);
  EXPECT_EQ(attacked.winner, 0u);
}

TEST(Voting, NeverWarns) { EXPECT_FALSE(voting_warn(Sample::filled(2, 2, 2, 1))); }

TEST(Voting, MatchesReference) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 4 + trial % 5, h = 4, b = 1 + trial % 3, p = 1 + trial % 2;
    const auto f = support::hashed_model(static_cast<std::uint32_t>(trial), 3);
    const VotingDefender r2 = make_voting_defender(f, build_ablation_set(w, h, b), build_patch_set(w, h, p));
    const Sample x = support::random_sample(rng, w, h, 2);
    const ref::Tally t = ref::vote(support::to_grid(x), support::model_of(f, 2), b);
    const VoteTally got = voting_tally(x, r2.model, r2.ablations);
    EXPECT_EQ(static_cast<int>(got.winner), t.winner);
    EXPECT_EQ(static_cast<int>(got.margin()), t.margin);
    EXPECT_EQ(voting_certify(x, r2), t.margin > 2 * ref::delta(w, h, p, b));
  }
}

TEST(Voting, CertifiedSamplesResistEveryPatch) {
  // Every band of the all-ones sample votes 1, so the 6-0 split beats 2*delta = 4.
  const auto f = make_synthetic_classifier("majority", 3);
  const VotingDefender r2 = make_voting_defender(f, build_ablation_set(6, 4, 1), build_patch_set(6, 4, 2));
  const Sample x = Sample::filled(6, 4, 2, 1);
  ASSERT_TRUE(voting_certify(x, r2));
  const PatchSet ps = build_patch_set(6, 4, 2);
  for (const auto& p : ps.regions) {
    const std::vector<Pixel> twos(4, 2);
    EXPECT_EQ(voting_predict(overwrite_patch(x, p, twos), r2), voting_predict(x, r2));
  }
}
