#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchcert/crosscert.hpp"
#include "patchcert/dataset.hpp"

namespace patchcert {

/// One malicious variant x' = (J - p) ⊙ x + p ⊙ content.
struct AttackVariant {
  std::size_t patch_index = 0;
  std::vector<Pixel> content;
  Sample sample;
};

/// All values 0..alphabet, or 1..alphabet without the sentinel.
std::vector<Pixel> attack_alphabet(Pixel alphabet, bool include_sentinel = true);

/// Exhaustive walk over every patch placement and every content in alphabet^{|p|}.
/// Order is patch-major, then content lexicographic in alphabet order.
class AttackEnumeration {
 public:
  AttackEnumeration(Sample x, const PatchSet& patches, std::vector<Pixel> alphabet);

  /// |P| * |alphabet|^{|p|}, saturating at ULLONG_MAX.
  unsigned long long count() const noexcept { return count_; }
  /// Throws BudgetError when count() exceeds `budget`.
  void require_within(unsigned long long budget) const;

  /// Advances to the next variant; false once exhausted.
  bool next(AttackVariant& out);

 private:
  Sample x_;
  const PatchSet* patches_;
  std::vector<Pixel> alphabet_;
  unsigned long long count_ = 0;
  std::size_t patch_ = 0;
  std::vector<std::size_t> digits_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<AttackVariant> enumerate_attacks(const Sample& x, const PatchSet& patches,
                                             const std::vector<Pixel>& alphabet,
                                             unsigned long long budget);

enum class Guarantee {
  detection,    // certifiably detectable
  recovery,     // certifiably recoverable
  unwavering,   // certifiably unwavering
  no_case3,     // TMA sample never reaches Case III under the revised prediction
  nac_masking,  // masking necessary attack condition
  nac_voting,   // voting necessary attack condition
};
std::string_view to_string(Guarantee g);

struct Violation {
  std::string sample_id;
  std::optional<DefenderKind> defender;  // unset for NAC checks
  Guarantee guarantee = Guarantee::detection;
  std::size_t patch_index = 0;
  std::vector<Pixel> content;
  std::string observed;
  std::string required;
};

struct OracleOptions {
  /// Empty means the full domain 0..A of the dataset.
  std::vector<Pixel> alphabet;
  bool exclude_sentinel = false;
  unsigned long long budget = 1'000'000;
  unsigned workers = 1;
};

/// Original vs revised double-masking label disagreements on benign samples and their variants (informational).
struct DifferentialEntry {
  std::string sample_id;
  std::optional<std::size_t> patch_index;  // unset: the benign sample itself
  std::vector<Pixel> content;
  Label original = 0;
  Label revised = 0;
};

struct DifferentialReport {
  unsigned long long inputs_checked = 0;
  std::vector<DifferentialEntry> disagreements;
};

struct AuditPlan {
  bool certify_cc = false;
  bool certify_cc_base = false;
  bool nac = false;
  bool differential = false;
};

struct AuditResult {
  std::vector<CertificateRecord> cc_records;
  std::vector<CertificateRecord> cc_base_records;
  std::vector<Violation> violations;
  DifferentialReport differential;
  unsigned long long variants_per_sample = 0;
  unsigned long long variants_checked = 0;
};

/// Single pass over every sample and every variant, running the checks selected by `plan`.
/// Results are in dataset order regardless of `options.workers`.
AuditResult run_audit(const Dataset& dataset, const DefenderPair& defenders, const AuditPlan& plan,
                      const OracleOptions& options);

/// Checks the unwavering/detectable/recoverable certificates (and no-Case-III for cc) against
/// every enumerated variant of every certified sample.
std::vector<Violation> validate_certificates(const Dataset& dataset, DefenderKind kind,
                                             const DefenderPair& defenders, const OracleOptions& options);

/// Checks that every silent successful attack satisfies the matching necessary attack condition.
std::vector<Violation> validate_nac_necessity(const Dataset& dataset, const DefenderPair& defenders,
                                              const OracleOptions& options);

}  // namespace patchcert
