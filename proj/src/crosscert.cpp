#include "patchcert/crosscert.hpp"

#include <algorithm>

namespace patchcert {

std::string_view to_string(DefenderKind kind) { return kind == DefenderKind::cc ? "cc" : "cc-base"; }

std::optional<DefenderKind> parse_defender_kind(std::string_view name) {
  if (name == "cc") return DefenderKind::cc;
  if (name == "cc-base") return DefenderKind::cc_base;
  return std::nullopt;
}

Label DefenderPair::label_count() const {
  return std::max(r1.model->label_count(), r2.model->label_count());
}

DefenderPair make_defender_pair(const Geometry& g, ClassifierHandle h, ClassifierHandle f, Mutation mutation) {
  PatchSet patches = build_patch_set(g.width, g.height, g.patch_side);
  MaskSet masks = build_mask_set(g.width, g.height, g.patch_side, g.masks_per_axis);
  AblationSet bands = build_ablation_set(g.width, g.height, g.band_width);
  VotingDefender r2 = make_voting_defender(std::move(f), std::move(bands), patches);
  return DefenderPair{MaskingDefender{std::move(h), std::move(masks)}, std::move(r2), std::move(patches),
                      mutation};
}

Prediction cc_predict(const Sample& x, const DefenderPair& d) {
  Prediction out;
  out.r1 = predict_revised(x, d.r1, d.mutation);
  out.g2 = voting_predict(x, d.r2);
  out.label = out.r1.label;
  out.warning = out.r1.label != out.g2 || out.r1.warning || voting_warn(x);
  return out;
}

Prediction cc_base_predict(const Sample& x, const DefenderPair& d) {
  Prediction out;
  out.r1 = predict_original(x, d.r1);
  out.g2 = voting_predict(x, d.r2);
  out.label = out.r1.label;
  out.warning = out.r1.label != out.g2;
  return out;
}

Prediction predict(DefenderKind kind, const Sample& x, const DefenderPair& d) {
  return kind == DefenderKind::cc ? cc_predict(x, d) : cc_base_predict(x, d);
}

namespace {

// Shared by both frameworks: g1/g2, c1, c2 and the unwavering certificate.
CertificateRecord common_record(DefenderKind kind, const DefenderPair& d,
                                const Prediction& prediction, const VoteTally& tally, bool c1,
                                std::string sample_id) {
  CertificateRecord rec;
  rec.sample_id = std::move(sample_id);
  rec.defender = kind;
  rec.g = prediction.label;
  rec.warning = prediction.warning;
  rec.r1_case = prediction.r1.case_tag;
  rec.g1 = prediction.r1.label;
  rec.g2 = tally.winner;
  rec.c1 = c1;
  rec.c2 = voting_certify(tally, d.r2.delta);
  rec.c_u = rec.g1 == rec.g2 && rec.c1 && rec.c2;
  rec.c_r = rec.c1;
  return rec;
}

}  // namespace

CertificateRecord cc_certify(const Sample& x, const DefenderPair& d, std::string sample_id) {
  const Prediction prediction = cc_predict(x, d);
  const MaskingAnalysis masking = analyze_masking(x, d.r1, d.patches, prediction.r1.label);
  const VotingAnalysis voting = analyze_voting(x, d.r2, d.patches);
  CertificateRecord rec = common_record(DefenderKind::cc, d, prediction, voting.tally,
                                        tma_check(masking.table), std::move(sample_id));

  AttackSet att_r1 = build_att_set_r1(masking, d.patches, d.label_count());
  AttackSet att_r2 = build_att_set_r2(voting, d.patches, d.label_count(), d.mutation);
  bool shared = false;
  for (const auto& c : att_r1.members) {
    if (att_r2.members.contains(c)) {
      shared = true;
      break;
    }
  }
  rec.c_d = att_intersection_ok(att_r1, att_r2, rec.g1);
  if (rec.c_d) rec.provenance = shared ? "att-all-benign" : "att-empty";
  rec.att_r1 = std::move(att_r1);
  rec.att_r2 = std::move(att_r2);
  return rec;
}

CertificateRecord cc_base_certify(const Sample& x, const DefenderPair& d, std::string sample_id) {
  const Prediction prediction = cc_base_predict(x, d);
  const VoteTally tally = voting_tally(x, d.r2.model, d.r2.ablations);
  CertificateRecord rec = common_record(DefenderKind::cc_base, d, prediction, tally,
                                        tma_check(x, d.r1.model, d.r1.masks), std::move(sample_id));
  if (rec.c1) {
    rec.c_d = true;
    rec.provenance = "base-c1";
  } else if (rec.c2 && rec.g1 == rec.g2) {
    rec.c_d = true;
    rec.provenance = "base-c2&agree";
  }
  return rec;
}

CertificateRecord certify(DefenderKind kind, const Sample& x, const DefenderPair& d, std::string sample_id) {
  return kind == DefenderKind::cc ? cc_certify(x, d, std::move(sample_id))
                                  : cc_base_certify(x, d, std::move(sample_id));
}

}  // namespace patchcert
