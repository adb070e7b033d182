#include "patchcert/oracle.hpp"

#include <algorithm>
#include <climits>
#include <exception>
#include <iterator>
#include <sstream>
#include <thread>

namespace patchcert {

std::vector<Pixel> attack_alphabet(Pixel alphabet, bool include_sentinel) {
  std::vector<Pixel> out;
  for (int v = include_sentinel ? 0 : 1; v <= alphabet; ++v) out.push_back(static_cast<Pixel>(v));
  return out;
}

namespace {

unsigned long long saturating_mul(unsigned long long a, unsigned long long b) {
  if (a != 0 && b > ULLONG_MAX / a) return ULLONG_MAX;
  return a * b;
}

}  // namespace

AttackEnumeration::AttackEnumeration(Sample x, const PatchSet& patches, std::vector<Pixel> alphabet)
    : x_(std::move(x)), patches_(&patches), alphabet_(std::move(alphabet)) {
  if (patches.width != x_.width() || patches.height != x_.height()) {
    throw DimensionError("attack enumeration: patch set frame " + std::to_string(patches.width) + "x" +
                         std::to_string(patches.height) + " does not match sample frame " +
                         std::to_string(x_.width()) + "x" + std::to_string(x_.height()));
  }
  if (alphabet_.empty()) throw DomainError("attack enumeration: empty content alphabet");
  for (Pixel v : alphabet_) {
    if (v > x_.alphabet()) {
      throw DomainError("attack enumeration: content value " + std::to_string(v) + " exceeds alphabet " +
                        std::to_string(x_.alphabet()));
    }
  }
  for (const auto& p : patches.regions) {
    unsigned long long per_patch = 1;
    for (std::size_t i = 0; i < p.popcount(); ++i) per_patch = saturating_mul(per_patch, alphabet_.size());
    count_ = count_ > ULLONG_MAX - per_patch ? ULLONG_MAX : count_ + per_patch;
  }
  done_ = patches.regions.empty();
}

void AttackEnumeration::require_within(unsigned long long budget) const {
  if (count_ > budget) {
    throw BudgetError("attack enumeration needs " + std::to_string(count_) + " variants per sample, budget is " +
                          std::to_string(budget),
                      count_, budget);
  }
}

bool AttackEnumeration::next(AttackVariant& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    digits_.assign((*patches_)[0].popcount(), 0);
  } else {
    // Last cell varies fastest.
    std::size_t i = digits_.size();
    while (i > 0) {
      --i;
      if (++digits_[i] < alphabet_.size()) break;
      digits_[i] = 0;
      if (i == 0) {
        if (++patch_ == patches_->size()) {
          done_ = true;
          return false;
        }
        digits_.assign((*patches_)[patch_].popcount(), 0);
        break;
      }
    }
    if (digits_.empty()) {
      if (++patch_ == patches_->size()) {
        done_ = true;
        return false;
      }
      digits_.assign((*patches_)[patch_].popcount(), 0);
    }
  }
  out.patch_index = patch_;
  out.content.resize(digits_.size());
  for (std::size_t i = 0; i < digits_.size(); ++i) out.content[i] = alphabet_[digits_[i]];
  out.sample = overwrite_patch(x_, (*patches_)[patch_], out.content);
  return true;
}

std::vector<AttackVariant> enumerate_attacks(const Sample& x, const PatchSet& patches,
                                             const std::vector<Pixel>& alphabet, unsigned long long budget) {
  AttackEnumeration e(x, patches, alphabet);
  e.require_within(budget);
  std::vector<AttackVariant> out;
  out.reserve(e.count());
  AttackVariant v;
  while (e.next(v)) out.push_back(v);
  return out;
}

std::string_view to_string(Guarantee g) {
  switch (g) {
    case Guarantee::detection: return "detection";
    case Guarantee::recovery: return "recovery";
    case Guarantee::unwavering: return "unwavering";
    case Guarantee::no_case3: return "no-case-III";
    case Guarantee::nac_masking: return "nac-masking";
    case Guarantee::nac_voting: return "nac-voting";
  }
  return "?";
}

namespace {

std::string describe(const Prediction& p) {
  std::ostringstream s;
  s << "label=" << p.label << " warning=" << (p.warning ? "true" : "false")
    << " case=" << to_string(p.r1.case_tag);
  return s.str();
}

struct SampleResult {
  std::optional<CertificateRecord> cc;
  std::optional<CertificateRecord> cc_base;
  std::vector<Violation> violations;
  std::vector<DifferentialEntry> disagreements;
  unsigned long long inputs = 0;
  unsigned long long variants = 0;
};

void check_certificate(const CertificateRecord& rec, const Prediction& p, const AttackVariant& v,
                       std::vector<Violation>& out) {
  auto report = [&](Guarantee g, std::string required) {
    out.push_back(Violation{rec.sample_id, rec.defender, g, v.patch_index, v.content, describe(p),
                            std::move(required)});
  };
  const std::string g = std::to_string(rec.g);
  if (rec.c_u && (p.label != rec.g || p.warning)) report(Guarantee::unwavering, "label=" + g + " warning=false");
  if (rec.c_d && p.label != rec.g && !p.warning) report(Guarantee::detection, "label=" + g + " or warning=true");
  if (rec.c_r && p.label != rec.g) report(Guarantee::recovery, "label=" + g);
  if (rec.defender == DefenderKind::cc && rec.c1 && p.r1.case_tag == MaskingCase::majority) {
    report(Guarantee::no_case3, "masking case I or II");
  }
}

SampleResult audit_sample(const LabeledSample& s, const DefenderPair& d, const AuditPlan& plan,
                          const OracleOptions& options) {
  SampleResult r;
  const Sample& x = s.sample;
  std::vector<Pixel> alphabet =
      options.alphabet.empty() ? attack_alphabet(x.alphabet(), !options.exclude_sentinel) : options.alphabet;
  if (options.exclude_sentinel) std::erase(alphabet, kSentinel);
  AttackEnumeration variants(x, d.patches, std::move(alphabet));
  variants.require_within(options.budget);

  const bool need_cc = plan.certify_cc || plan.nac || plan.differential;
  const bool need_base = plan.certify_cc_base || plan.differential;
  if (plan.certify_cc) r.cc = cc_certify(x, d, s.id);
  if (plan.certify_cc_base) r.cc_base = cc_base_certify(x, d, s.id);

  std::optional<MaskingAnalysis> masking;
  std::optional<VotingAnalysis> voting;
  if (plan.nac) {
    const Prediction benign = cc_predict(x, d);
    masking = analyze_masking(x, d.r1, d.patches, benign.r1.label);
    voting = analyze_voting(x, d.r2, d.patches);
  }
  if (plan.differential) {
    const Label revised = predict_revised(x, d.r1, d.mutation).label;
    const Label original = predict_original(x, d.r1).label;
    ++r.inputs;
    if (revised != original) r.disagreements.push_back({s.id, std::nullopt, {}, original, revised});
  }

  AttackVariant v;
  while (variants.next(v)) {
    ++r.variants;
    std::optional<Prediction> cc;
    std::optional<Prediction> base;
    if (need_cc) cc = cc_predict(v.sample, d);
    if (need_base) base = cc_base_predict(v.sample, d);

    if (r.cc) check_certificate(*r.cc, *cc, v, r.violations);
    if (r.cc_base) check_certificate(*r.cc_base, *base, v, r.violations);

    if (plan.nac) {
      const Label y1 = cc->r1.label;
      if (cc->r1.case_tag != MaskingCase::majority && y1 != masking->benign_label &&
          !nac_masking(*masking, v.patch_index, y1)) {
        r.violations.push_back(Violation{s.id, std::nullopt, Guarantee::nac_masking, v.patch_index, v.content,
                                         "g1=" + std::to_string(y1) + " case=" +
                                             std::string(to_string(cc->r1.case_tag)),
                                         "nac_masking holds for target " + std::to_string(y1)});
      }
      const Label y2 = cc->g2;
      if (y2 != voting->benign_label && !nac_voting(*voting, v.patch_index, y2, d.mutation)) {
        r.violations.push_back(Violation{s.id, std::nullopt, Guarantee::nac_voting, v.patch_index, v.content,
                                         "g2=" + std::to_string(y2),
                                         "nac_voting holds for target " + std::to_string(y2)});
      }
    }
    if (plan.differential) {
      ++r.inputs;
      if (cc->r1.label != base->r1.label) {
        r.disagreements.push_back({s.id, v.patch_index, v.content, base->r1.label, cc->r1.label});
      }
    }
  }
  return r;
}

}  // namespace

AuditResult run_audit(const Dataset& dataset, const DefenderPair& defenders, const AuditPlan& plan,
                      const OracleOptions& options) {
  std::vector<SampleResult> results(dataset.size());
  std::vector<std::exception_ptr> errors(dataset.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(dataset.size())));

  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < dataset.size(); i += workers) {
      try {
        results[i] = audit_sample(dataset[i], defenders, plan, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AuditResult out;
  for (auto& r : results) {
    if (r.cc) out.cc_records.push_back(std::move(*r.cc));
    if (r.cc_base) out.cc_base_records.push_back(std::move(*r.cc_base));
    std::move(r.violations.begin(), r.violations.end(), std::back_inserter(out.violations));
    std::move(r.disagreements.begin(), r.disagreements.end(), std::back_inserter(out.differential.disagreements));
    out.differential.inputs_checked += r.inputs;
    out.variants_checked += r.variants;
    out.variants_per_sample = r.variants;
  }
  return out;
}

std::vector<Violation> validate_certificates(const Dataset& dataset, DefenderKind kind,
                                             const DefenderPair& defenders, const OracleOptions& options) {
  AuditPlan plan;
  (kind == DefenderKind::cc ? plan.certify_cc : plan.certify_cc_base) = true;
  return run_audit(dataset, defenders, plan, options).violations;
}

std::vector<Violation> validate_nac_necessity(const Dataset& dataset, const DefenderPair& defenders,
                                              const OracleOptions& options) {
  AuditPlan plan;
  plan.nac = true;
  return run_audit(dataset, defenders, plan, options).violations;
}

}  // namespace patchcert
