#include <gtest/gtest.h>

#include <random>

#include "patchcert/crosscert.hpp"
#include "patchcert/fixtures.hpp"
#include "support.hpp"

using namespace patchcert;

namespace {

struct Pairing {
  ClassifierHandle h, f;
};

std::vector<Pairing> pairings(int trial) {
  return {{support::hashed_model(static_cast<std::uint32_t>(trial), 3),
           support::hashed_model(static_cast<std::uint32_t>(trial + 1000), 3)},
          {make_synthetic_classifier("majority", 3), make_synthetic_classifier("majority", 3)},
          {make_synthetic_classifier("modsum", 3), make_synthetic_classifier("weighted", 3)}};
}

}  // namespace

TEST(CrossCheck, ConstantModelsCertifyEverything) {
  const auto c = make_synthetic_classifier("constant=1", 3);
  const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, 1}, c, c);
  for (DefenderKind kind : {DefenderKind::cc, DefenderKind::cc_base}) {
    const CertificateRecord r = certify(kind, Sample::filled(6, 6, 2, 2), d, "x");
    EXPECT_EQ(r.g, 1u);
    EXPECT_FALSE(r.warning);
    EXPECT_TRUE(r.c_u && r.c_d && r.c_r);
  }
}

TEST(CrossCheck, WarnsOnDisagreement) {
  const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, 2}, make_synthetic_classifier("constant=1", 3),
                                            make_synthetic_classifier("constant=2", 3));
  const Prediction p = cc_predict(Sample::filled(6, 6, 2, 1), d);
  EXPECT_EQ(p.label, 1u);
  EXPECT_EQ(p.g2, 2u);
  EXPECT_TRUE(p.warning);
  const CertificateRecord r = cc_certify(Sample::filled(6, 6, 2, 1), d);
  EXPECT_FALSE(r.c_u);
  EXPECT_TRUE(r.c_r);
  EXPECT_TRUE(r.c_d);  // c1 holds, so R1's attack set is all-benign
}

TEST(CrossCheck, MatchesReference) {
  std::mt19937 rng(12);
  for (int b : {1, 2}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Sample x = support::random_sample(rng, 6, 6, 2);
      for (const auto& [h, f] : pairings(trial)) {
        const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, b}, h, f);
        const ref::Setup s{6, 6, 2, 3, b, 3, support::model_of(h, 2), support::model_of(f, 2)};
        const auto g = support::to_grid(x);
        const ref::Certificate want_cc = ref::crosscert(g, s);
        const CertificateRecord cc = cc_certify(x, d);
        EXPECT_EQ(static_cast<int>(cc.g), want_cc.g);
        EXPECT_EQ(cc.warning, want_cc.warning);
        EXPECT_EQ(cc.c_u, want_cc.c_u);
        EXPECT_EQ(cc.c_d, want_cc.c_d) << "b=" << b << " trial " << trial;
        EXPECT_EQ(cc.c_r, want_cc.c_r);

        const ref::Certificate want_base = ref::crosscert_base(g, s);
        const CertificateRecord base = cc_base_certify(x, d);
        EXPECT_EQ(static_cast<int>(base.g), want_base.g);
        EXPECT_EQ(base.warning, want_base.warning);
        EXPECT_EQ(base.c_u, want_base.c_u);
        EXPECT_EQ(base.c_d, want_base.c_d);
        EXPECT_EQ(base.c_r, want_base.c_r);
      }
    }
  }
}

TEST(CrossCheck, LogicalStructure) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const Sample x = support::random_sample(rng, 6, 6, 2);
    for (const auto& [h, f] : pairings(trial)) {
      const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, 1}, h, f);
      const CertificateRecord cc = cc_certify(x, d);
      const CertificateRecord base = cc_base_certify(x, d);
      EXPECT_TRUE(!cc.c_u || cc.c_d);
      EXPECT_TRUE(!base.c_u || base.c_d);
      EXPECT_TRUE(!cc.c_u || cc.c_r);
      if (cc.g1 == base.g1) EXPECT_TRUE(!base.c_d || cc.c_d);
      if (cc.c_d) {
        EXPECT_TRUE(cc.provenance == "att-empty" || cc.provenance == "att-all-benign");
      } else {
        EXPECT_EQ(cc.provenance, "none");
      }
    }
  }
}

TEST(CrossCheck, AttackSetsCarryBenignPairs) {
  const auto h = make_synthetic_classifier("majority", 3);
  const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, 2}, h, h);
  const CertificateRecord r = cc_certify(Sample::filled(6, 6, 2, 1), d);
  ASSERT_TRUE(r.att_r1 && r.att_r2);
  for (std::size_t p = 0; p < d.patches.size(); ++p) {
    EXPECT_TRUE(r.att_r1->contains(p, r.g1));
    EXPECT_TRUE(r.att_r2->contains(p, r.g2));
  }
  EXPECT_FALSE(cc_base_certify(Sample::filled(6, 6, 2, 1), d).att_r1.has_value());
}

TEST(CrossCheck, BaseProvenance) {
  const auto c = make_synthetic_classifier("constant=0", 3);
  const DefenderPair d = make_defender_pair(Geometry{6, 6, 2, 3, 1}, c, c);
  EXPECT_EQ(cc_base_certify(Sample::filled(6, 6, 2, 1), d).provenance, "base-c1");
  const DefenderPair split = make_defender_pair(Geometry{6, 6, 1, 2, 1}, make_fixture("mask-split").h.handle(), c);
  const CertificateRecord r = cc_base_certify(Sample::filled(6, 6, 2, 1), split);
  EXPECT_FALSE(r.c1);
  EXPECT_TRUE(r.c2);
  EXPECT_EQ(r.provenance, "base-c2&agree");
}

TEST(CrossCheck, DefenderNames) {
  EXPECT_EQ(parse_defender_kind("cc"), DefenderKind::cc);
  EXPECT_EQ(parse_defender_kind("cc-base"), DefenderKind::cc_base);
  EXPECT_FALSE(parse_defender_kind("pc").has_value());
  EXPECT_EQ(to_string(DefenderKind::cc_base), "cc-base");
}
