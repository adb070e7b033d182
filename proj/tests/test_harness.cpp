#include <gtest/gtest.h>

#include <cstdlib>

#include "patchcert/fixtures.hpp"
#include "patchcert/harness.hpp"
#include "support.hpp"

using namespace patchcert;

namespace {

CertificateRecord record(Label g, bool c_u, bool c_d, bool c_r) {
  CertificateRecord r;
  r.g = g;
  r.c_u = c_u;
  r.c_d = c_d;
  r.c_r = c_r;
  return r;
}

RunConfig suite_config(const std::filesystem::path& dir, const std::string& h, const std::string& f) {
  RunConfig cfg;
  cfg.dataset = dir;
  cfg.patch_side = 2;
  cfg.masks_per_axis = 3;
  cfg.band_width = 2;
  cfg.classifier_h = h;
  cfg.classifier_f = f;
  cfg.label_count = 3;
  return cfg;
}

std::filesystem::path suite_dir(const std::string& name, std::size_t n) {
  const auto dir = support::scratch_dir(name);
  save_dataset(dir, synthetic_suite(n));
  return dir;
}

}  // namespace

TEST(Fraction, SixDigitsHalfEven) {
  EXPECT_EQ(format_fraction({2, 3}), "0.666667");
  EXPECT_EQ(format_fraction({1, 3}), "0.333333");
  EXPECT_EQ(format_fraction({3, 3}), "1.000000");
  EXPECT_EQ(format_fraction({0, 7}), "0.000000");
  EXPECT_EQ(format_fraction({1, 2'000'000}), "0.000000");  // 0.0000005 rounds to even
  EXPECT_EQ(format_fraction({3, 2'000'000}), "0.000002");  // 0.0000015 rounds to even
  EXPECT_EQ(format_fraction({5, 2'000'000}), "0.000002");
  EXPECT_THROW(format_fraction({1, 0}), DomainError);
}

TEST(Metrics, HandCountedExample) {
  const AccuracyReport m = compute_metrics(
      {record(1, true, true, true), record(0, false, true, false), record(2, true, true, true)}, {1, 0, 0});
  const auto j = to_json(m);
  EXPECT_EQ(j.at("acc_clean"), "0.666667");
  EXPECT_EQ(j.at("acc_cert_d"), "0.666667");
  EXPECT_EQ(j.at("acc_cert_u"), "0.333333");
  EXPECT_EQ(j.at("acc_cert_r"), "0.333333");
}

TEST(Metrics, AllCorrect) {
  const AccuracyReport m = compute_metrics({record(1, true, true, true), record(0, true, true, true)}, {1, 0});
  EXPECT_EQ(format_fraction(m.acc_cert_u), "1.000000");
}

TEST(Metrics, Errors) {
  EXPECT_THROW(compute_metrics({}, {}), DomainError);
  EXPECT_THROW(compute_metrics({record(0, true, true, true)}, {0, 1}), DomainError);
}

TEST(Workers, Environment) {
  ::unsetenv("PATCHCERT_WORKERS");
  EXPECT_EQ(workers_from_env(2), 2u);
  ::setenv("PATCHCERT_WORKERS", "4", 1);
  EXPECT_EQ(workers_from_env(), 4u);
  ::setenv("PATCHCERT_WORKERS", "zero", 1);
  EXPECT_THROW(workers_from_env(), DomainError);
  ::unsetenv("PATCHCERT_WORKERS");
}

TEST(RunCertify, ConstantModelsCertifyAll) {
  const auto dir = support::scratch_dir("constant_run");
  Dataset ds = synthetic_suite(4);
  for (auto& s : ds) s.label = 1;
  save_dataset(dir, ds);
  RunConfig cfg = suite_config(dir, "synthetic:constant=1", "synthetic:constant=1");
  cfg.band_width = 1;  // delta 2, so a 6-0 vote clears the margin
  const CertifyResult r = run_certify(cfg);
  for (const char* k : {"acc_clean", "acc_cert_d", "acc_cert_u", "acc_cert_r"}) {
    EXPECT_EQ(r.report.at("metrics").at(k), "1.000000") << k;
  }
  EXPECT_TRUE(r.report.at("timing_ms").is_null());
  EXPECT_TRUE(r.report.at("violations").empty());
}

TEST(RunCertify, InvalidGeometryFailsBeforeAnyModelStarts) {
  const auto dir = suite_dir("bad_k", 2);
  const auto marker = dir / "started";
  const std::string spawn = "extern:touch " + marker.string() + "; " + PEER_PATH + " modsum";
  RunConfig cfg = suite_config(dir, spawn, spawn);
  cfg.masks_per_axis = 0;
  EXPECT_THROW(run_certify(cfg), GeometryError);
  EXPECT_FALSE(std::filesystem::exists(marker));
  cfg.masks_per_axis = 3;
  cfg.band_width = 7;
  EXPECT_THROW(run_certify(cfg), GeometryError);
  EXPECT_FALSE(std::filesystem::exists(marker));
}

TEST(RunCertify, LabelOutsideRange) {
  const auto dir = support::scratch_dir("label_range");
  Dataset ds = synthetic_suite(3);
  ds[1].label = 2;
  save_dataset(dir, ds);
  RunConfig cfg = suite_config(dir, "synthetic:modsum", "synthetic:modsum");
  cfg.label_count = 2;
  EXPECT_THROW(run_certify(cfg), DomainError);
}

TEST(RunCertify, WorkersDoNotChangeReport) {
  const auto dir = suite_dir("workers", 8);
  RunConfig cfg = suite_config(dir, "synthetic:majority", "synthetic:weighted");
  cfg.workers = 1;
  const std::string one = dump_report(run_certify(cfg).report);
  cfg.workers = 3;
  EXPECT_EQ(dump_report(run_certify(cfg).report), one);
}

TEST(RunCertify, SuiteMatchesGolden) {
  const auto dir = suite_dir("golden", 12);
  RunConfig cfg = suite_config(dir, "synthetic:majority", "synthetic:weighted");
  cfg.band_width = 1;
  CertifyResult r = run_certify(cfg);

  // Per-sample cross-check against the reference defenders before comparing bytes.
  const Dataset ds = load_dataset(dir);
  const ref::Setup s{6, 6, 2, 3, 1, 3, support::model_of(make_synthetic_classifier("majority", 3), 2),
                     support::model_of(make_synthetic_classifier("weighted", 3), 2)};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ref::Certificate want = ref::crosscert(support::to_grid(ds[i].sample), s);
    const auto& rec = r.report.at("records").at(i);
    EXPECT_EQ(rec.at("label").get<int>(), want.g);
    EXPECT_EQ(rec.at("c_u").get<bool>(), want.c_u);
    EXPECT_EQ(rec.at("c_d").get<bool>(), want.c_d);
    EXPECT_EQ(rec.at("c_r").get<bool>(), want.c_r);
  }

  r.report["config"]["dataset"] = "suite";
  const std::string got = dump_report(r.report);
  const std::filesystem::path golden = std::filesystem::path(GOLDEN_DIR) / "suite_majority_weighted.json";
  if (std::getenv("PATCHCERT_UPDATE_GOLDEN") != nullptr) support::spit(golden, got);
  ASSERT_TRUE(std::filesystem::exists(golden)) << "missing golden file; rerun with PATCHCERT_UPDATE_GOLDEN=1";
  EXPECT_EQ(got, support::slurp(golden));
}

TEST(RunOracle, MutationFixtureReportsViolations) {
  const Scenario s = mutation_fixture(Mutation::voting_nac_drop_overlap);
  const auto dir = support::scratch_dir("oracle_fixture");
  export_scenario(s, dir);
  RunConfig cfg;
  cfg.dataset = dir / "dataset";
  cfg.patch_side = s.geometry.patch_side;
  cfg.masks_per_axis = s.geometry.masks_per_axis;
  cfg.band_width = s.geometry.band_width;
  cfg.classifier_h = "table:" + (dir / "h.json").string();
  cfg.classifier_f = "table:" + (dir / "f.json").string();
  cfg.label_count = 3;
  EXPECT_TRUE(run_oracle(cfg).audit.violations.empty());
  cfg.mutation = s.mutation;
  const OracleResult r = run_oracle(cfg);
  EXPECT_FALSE(r.audit.violations.empty());
  EXPECT_EQ(r.report.at("violations").size(), r.audit.violations.size());
  EXPECT_EQ(r.report.at("oracle").at("variants_per_sample"), 108);
  cfg.budget = 0;
  EXPECT_THROW(run_oracle(cfg), BudgetError);
}

TEST(RunOracle, AlphabetOptions) {
  const auto dir = suite_dir("oracle_alphabet", 2);
  RunConfig cfg = suite_config(dir, "synthetic:majority", "synthetic:majority");
  cfg.exclude_sentinel = true;
  EXPECT_EQ(run_oracle(cfg).report.at("oracle").at("variants_per_sample"), 25 * 16);
  cfg.exclude_sentinel = false;
  cfg.alphabet_max = 1;
  EXPECT_EQ(run_oracle(cfg).report.at("oracle").at("variants_per_sample"), 25 * 16);
  cfg.alphabet_max = 3;
  EXPECT_THROW(run_oracle(cfg), DomainError);
}

TEST(Report, ReadBackAndSummarize) {
  const auto dir = suite_dir("summary", 3);
  const CertifyResult r = run_certify(suite_config(dir, "synthetic:majority", "synthetic:majority"));
  const auto path = dir / "report.json";
  write_report(path, r.report);
  const auto back = read_report(path);
  EXPECT_EQ(dump_report(back), dump_report(r.report));
  const std::string text = summarize_report(back);
  EXPECT_NE(text.find("acc_cert_u"), std::string::npos);
  EXPECT_NE(text.find("s000.sgf"), std::string::npos);
  support::spit(path, "{\"config\": {}}");
  EXPECT_THROW(read_report(path), FormatError);
}
