#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchcert/attack_analysis.hpp"

namespace patchcert {

enum class DefenderKind { cc, cc_base };
std::string_view to_string(DefenderKind kind);
std::optional<DefenderKind> parse_defender_kind(std::string_view name);

/// The two base recovery defenders sharing one frame and patch set.
/// R1 is masking-based (model h), R2 is voting-based (model f).
struct DefenderPair {
  MaskingDefender r1;
  VotingDefender r2;
  PatchSet patches;
  Mutation mutation = Mutation::none;

  Label label_count() const;
};

struct Geometry {
  int width = 0;
  int height = 0;
  int patch_side = 0;
  int masks_per_axis = 0;
  int band_width = 0;
};

/// Builds patch, mask and ablation sets and Δ. Throws GeometryError on invalid parameters.
DefenderPair make_defender_pair(const Geometry& geometry, ClassifierHandle h, ClassifierHandle f,
                                Mutation mutation = Mutation::none);

struct Prediction {
  Label label = 0;
  bool warning = false;
  MaskingOutcome r1;
  Label g2 = 0;
};

/// cc: label g1 from the revised prediction, warning when g1 != g2 or R1 warns.
Prediction cc_predict(const Sample& x, const DefenderPair& d);
/// cc-base: label g1 from the original prediction, warning when g1 != g2.
Prediction cc_base_predict(const Sample& x, const DefenderPair& d);
Prediction predict(DefenderKind kind, const Sample& x, const DefenderPair& d);

struct CertificateRecord {
  std::string sample_id;
  DefenderKind defender = DefenderKind::cc;
  Label g = 0;
  bool warning = false;
  bool c_u = false;  // unwavering
  bool c_d = false;  // detectable
  bool c_r = false;  // recoverable
  /// Why c_d holds: base-c1, base-c2&agree, att-empty, att-all-benign, or none.
  std::string provenance = "none";
  MaskingCase r1_case = MaskingCase::agreed;
  Label g1 = 0;
  Label g2 = 0;
  bool c1 = false;
  bool c2 = false;
  /// Only filled for cc.
  std::optional<AttackSet> att_r1;
  std::optional<AttackSet> att_r2;
};

CertificateRecord cc_certify(const Sample& x, const DefenderPair& d, std::string sample_id = {});
CertificateRecord cc_base_certify(const Sample& x, const DefenderPair& d, std::string sample_id = {});
CertificateRecord certify(DefenderKind kind, const Sample& x, const DefenderPair& d,
                          std::string sample_id = {});

}  // namespace patchcert
