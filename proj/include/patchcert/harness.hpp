#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patchcert/crosscert.hpp"
#include "patchcert/dataset.hpp"
#include "patchcert/oracle.hpp"

namespace patchcert {

struct RunConfig {
  std::filesystem::path dataset;
  int patch_side = 0;
  int masks_per_axis = 0;
  int band_width = 0;
  std::string classifier_h;
  std::string classifier_f;
  DefenderKind defender = DefenderKind::cc;
  /// Unset: one more than the largest dataset label, at least 2.
  std::optional<Label> label_count;
  Mutation mutation = Mutation::none;
  bool allow_sentinel = false;
  bool use_cache = true;
  unsigned workers = 1;
  std::chrono::milliseconds extern_timeout{5000};
  /// Oracle only. Unset alphabet_max means the dataset's A.
  std::optional<int> alphabet_max;
  bool exclude_sentinel = false;
  unsigned long long budget = 1'000'000;
  /// Wall-clock time is left out of reports unless asked for, to keep them reproducible.
  bool record_timing = false;
};

/// Worker count from PATCHCERT_WORKERS, else `fallback`. Throws DomainError on a malformed value.
unsigned workers_from_env(unsigned fallback = 1);

/// Exact ratio; `format_fraction` renders it with six round-half-even digits.
struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

std::string format_fraction(const Fraction& f);

struct AccuracyReport {
  std::size_t samples = 0;
  Fraction acc_clean;
  Fraction acc_cert_d;
  Fraction acc_cert_u;
  Fraction acc_cert_r;
  std::vector<CertificateRecord> records;
};

/// Throws DomainError when the inputs are empty or the counts differ.
AccuracyReport compute_metrics(const std::vector<CertificateRecord>& records, const std::vector<Label>& labels);

/// Everything a run needs, built and validated before any classification.
struct RunContext {
  Dataset dataset;
  Geometry geometry;
  Label label_count = 0;
  DefenderPair defenders;
};

RunContext prepare_run(const RunConfig& cfg);

struct CertifyResult {
  AccuracyReport accuracy;
  nlohmann::ordered_json report;
};

CertifyResult run_certify(const RunConfig& cfg);

struct OracleResult {
  AccuracyReport accuracy;
  AuditResult audit;
  nlohmann::ordered_json report;
};

/// Certifies with the configured defender, then validates its certificates and the NAC
/// necessity claims over every enumerated variant.
OracleResult run_oracle(const RunConfig& cfg);

nlohmann::ordered_json to_json(const CertificateRecord& rec);
nlohmann::ordered_json to_json(const Violation& v);
nlohmann::ordered_json to_json(const AccuracyReport& metrics);

/// Pretty JSON with a trailing newline.
std::string dump_report(const nlohmann::ordered_json& report);
void write_report(const std::filesystem::path& path, const nlohmann::ordered_json& report);
nlohmann::ordered_json read_report(const std::filesystem::path& path);

/// Human-readable summary of a report file.
std::string summarize_report(const nlohmann::ordered_json& report);

}  // namespace patchcert
