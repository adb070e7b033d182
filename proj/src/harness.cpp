#include "patchcert/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace patchcert {

using nlohmann::ordered_json;

unsigned workers_from_env(unsigned fallback) {
  const char* raw = std::getenv("PATCHCERT_WORKERS");
  if (raw == nullptr || *raw == '\0') return fallback;
  const std::string_view text(raw);
  unsigned value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || value == 0) {
    throw DomainError("PATCHCERT_WORKERS must be a positive integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::string format_fraction(const Fraction& f) {
  if (f.denominator == 0) throw DomainError("fraction with zero denominator");
  constexpr std::uint64_t kScale = 1'000'000;
  std::uint64_t scaled = f.numerator * kScale / f.denominator;
  const std::uint64_t rem = f.numerator * kScale % f.denominator;
  if (2 * rem > f.denominator || (2 * rem == f.denominator && scaled % 2 == 1)) ++scaled;
  std::ostringstream s;
  s << scaled / kScale << '.' << std::setw(6) << std::setfill('0') << scaled % kScale;
  return s.str();
}

AccuracyReport compute_metrics(const std::vector<CertificateRecord>& records, const std::vector<Label>& labels) {
  if (records.empty()) throw DomainError("cannot compute accuracies over an empty dataset");
  if (records.size() != labels.size()) {
    throw DomainError("metrics: " + std::to_string(records.size()) + " records for " +
                      std::to_string(labels.size()) + " labels");
  }
  AccuracyReport out;
  out.samples = records.size();
  const std::uint64_t n = records.size();
  out.acc_clean.denominator = out.acc_cert_d.denominator = out.acc_cert_u.denominator =
      out.acc_cert_r.denominator = n;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.g != labels[i]) continue;
    ++out.acc_clean.numerator;
    out.acc_cert_d.numerator += r.c_d;
    out.acc_cert_u.numerator += r.c_u;
    out.acc_cert_r.numerator += r.c_r;
  }
  out.records = records;
  return out;
}

namespace {

// Runs fn(i) for every index, spread over `workers` threads. Results keep index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned workers, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        slots[i].emplace(fn(i));
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
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Label> labels_of(const Dataset& d) {
  std::vector<Label> out;
  out.reserve(d.size());
  for (const auto& s : d) out.push_back(s.label);
  return out;
}

ordered_json config_json(const RunConfig& cfg, const RunContext& ctx) {
  const auto& d = ctx.defenders;
  ordered_json geometry;
  geometry["width"] = ctx.geometry.width;
  geometry["height"] = ctx.geometry.height;
  geometry["alphabet"] = ctx.dataset.front().sample.alphabet();
  geometry["patches"] = d.patches.size();
  geometry["masks"] = d.r1.masks.size();
  geometry["mask_width"] = d.r1.masks.mask_width;
  geometry["mask_height"] = d.r1.masks.mask_height;
  geometry["stride_x"] = d.r1.masks.stride_x;
  geometry["stride_y"] = d.r1.masks.stride_y;
  geometry["bands"] = d.r2.ablations.size();
  geometry["delta"] = d.r2.delta;

  ordered_json c;
  c["dataset"] = cfg.dataset.string();
  c["defender"] = to_string(cfg.defender);
  c["patch"] = cfg.patch_side;
  c["masks"] = cfg.masks_per_axis;
  c["ablation"] = cfg.band_width;
  c["classifier_h"] = cfg.classifier_h;
  c["classifier_f"] = cfg.classifier_f;
  c["labels"] = ctx.label_count;
  c["mutation"] = to_string(cfg.mutation);
  c["geometry"] = std::move(geometry);
  return c;
}

ordered_json records_json(const std::vector<CertificateRecord>& records, const Dataset& dataset) {
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    ordered_json r = to_json(records[i]);
    r["truth"] = dataset[i].label;
    out.push_back(std::move(r));
  }
  return out;
}

ordered_json base_report(const RunConfig& cfg, const RunContext& ctx, const AccuracyReport& accuracy) {
  ordered_json report;
  report["config"] = config_json(cfg, ctx);
  report["metrics"] = to_json(accuracy);
  report["records"] = records_json(accuracy.records, ctx.dataset);
  report["violations"] = ordered_json::array();
  return report;
}

void set_timing(ordered_json& report, const RunConfig& cfg, std::chrono::steady_clock::time_point start) {
  if (cfg.record_timing) {
    report["timing_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  } else {
    report["timing_ms"] = nullptr;
  }
}

}  // namespace

RunContext prepare_run(const RunConfig& cfg) {
  RunContext ctx;
  ctx.dataset = load_dataset(cfg.dataset, DatasetOptions{cfg.allow_sentinel});
  if (ctx.dataset.empty()) throw DomainError(cfg.dataset.string() + ": dataset has no samples");
  const Sample& first = ctx.dataset.front().sample;
  ctx.geometry = Geometry{first.width(), first.height(), cfg.patch_side, cfg.masks_per_axis, cfg.band_width};

  // Geometry errors surface here, before any classifier is built or queried.
  build_mask_set(ctx.geometry.width, ctx.geometry.height, cfg.patch_side, cfg.masks_per_axis);
  build_ablation_set(ctx.geometry.width, ctx.geometry.height, cfg.band_width);

  Label max_label = 0;
  for (const auto& s : ctx.dataset) max_label = std::max(max_label, s.label);
  ctx.label_count = cfg.label_count.value_or(std::max<Label>(2, max_label + 1));
  if (max_label >= ctx.label_count) {
    throw DomainError("dataset label " + std::to_string(max_label) + " outside [0, " +
                      std::to_string(ctx.label_count) + ")");
  }

  ExternalOptions ext;
  ext.timeout = cfg.extern_timeout;
  ext.expected_frame = std::pair{ctx.geometry.width, ctx.geometry.height};
  ClassifierHandle h = make_classifier_from_spec(cfg.classifier_h, ctx.label_count, ext);
  ClassifierHandle f = make_classifier_from_spec(cfg.classifier_f, ctx.label_count, ext);
  if (cfg.use_cache) {
    // Separate caches: the two models answer differently for the same pixels.
    h = with_cache(std::move(h), std::make_shared<QueryCache>());
    f = with_cache(std::move(f), std::make_shared<QueryCache>());
  }
  ctx.defenders = make_defender_pair(ctx.geometry, std::move(h), std::move(f), cfg.mutation);
  return ctx;
}

CertifyResult run_certify(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const RunContext ctx = prepare_run(cfg);
  std::vector<CertificateRecord> records =
      parallel_map<CertificateRecord>(ctx.dataset.size(), cfg.workers, [&](std::size_t i) {
        return certify(cfg.defender, ctx.dataset[i].sample, ctx.defenders, ctx.dataset[i].id);
      });
  CertifyResult out;
  out.accuracy = compute_metrics(records, labels_of(ctx.dataset));
  out.report = base_report(cfg, ctx, out.accuracy);
  set_timing(out.report, cfg, start);
  return out;
}

OracleResult run_oracle(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const RunContext ctx = prepare_run(cfg);

  OracleOptions options;
  options.exclude_sentinel = cfg.exclude_sentinel;
  options.budget = cfg.budget;
  options.workers = cfg.workers;
  if (cfg.alphabet_max) {
    if (*cfg.alphabet_max < 0 || *cfg.alphabet_max > 255) {
      throw DomainError("alphabet max must be in [0, 255], got " + std::to_string(*cfg.alphabet_max));
    }
    options.alphabet = attack_alphabet(static_cast<Pixel>(*cfg.alphabet_max), !cfg.exclude_sentinel);
  }

  AuditPlan plan;
  (cfg.defender == DefenderKind::cc ? plan.certify_cc : plan.certify_cc_base) = true;
  plan.nac = true;
  plan.differential = true;

  OracleResult out;
  out.audit = run_audit(ctx.dataset, ctx.defenders, plan, options);
  const auto& records = cfg.defender == DefenderKind::cc ? out.audit.cc_records : out.audit.cc_base_records;
  out.accuracy = compute_metrics(records, labels_of(ctx.dataset));
  out.report = base_report(cfg, ctx, out.accuracy);
  for (const auto& v : out.audit.violations) out.report["violations"].push_back(to_json(v));

  ordered_json oracle;
  const std::vector<Pixel> alphabet = options.alphabet.empty()
                                          ? attack_alphabet(ctx.dataset.front().sample.alphabet(), !cfg.exclude_sentinel)
                                          : options.alphabet;
  oracle["alphabet"] = std::vector<int>(alphabet.begin(), alphabet.end());
  oracle["budget"] = cfg.budget;
  oracle["variants_per_sample"] = out.audit.variants_per_sample;
  oracle["variants_checked"] = out.audit.variants_checked;
  ordered_json diff;
  diff["inputs_checked"] = out.audit.differential.inputs_checked;
  diff["disagreements"] = ordered_json::array();
  for (const auto& e : out.audit.differential.disagreements) {
    ordered_json j;
    j["sample_id"] = e.sample_id;
    j["patch_index"] = e.patch_index ? ordered_json(*e.patch_index) : ordered_json(nullptr);
    j["content"] = std::vector<int>(e.content.begin(), e.content.end());
    j["original"] = e.original;
    j["revised"] = e.revised;
    diff["disagreements"].push_back(std::move(j));
  }
  oracle["differential"] = std::move(diff);
  out.report["oracle"] = std::move(oracle);
  set_timing(out.report, cfg, start);
  return out;
}

ordered_json to_json(const CertificateRecord& rec) {
  ordered_json j;
  j["sample_id"] = rec.sample_id;
  j["defender"] = to_string(rec.defender);
  j["label"] = rec.g;
  j["warning"] = rec.warning;
  j["c_u"] = rec.c_u;
  j["c_d"] = rec.c_d;
  j["c_r"] = rec.c_r;
  j["provenance"] = rec.provenance;
  j["r1_case"] = to_string(rec.r1_case);
  j["g1"] = rec.g1;
  j["g2"] = rec.g2;
  j["c1"] = rec.c1;
  j["c2"] = rec.c2;
  auto att = [](const std::optional<AttackSet>& s) {
    if (!s) return ordered_json(nullptr);
    ordered_json a = ordered_json::array();
    for (const auto& c : s->members) a.push_back({c.patch_index, c.target});
    return a;
  };
  j["att_r1"] = att(rec.att_r1);
  j["att_r2"] = att(rec.att_r2);
  return j;
}

ordered_json to_json(const Violation& v) {
  ordered_json j;
  j["sample_id"] = v.sample_id;
  j["defender"] = v.defender ? ordered_json(to_string(*v.defender)) : ordered_json(nullptr);
  j["guarantee"] = to_string(v.guarantee);
  j["patch_index"] = v.patch_index;
  j["content"] = std::vector<int>(v.content.begin(), v.content.end());
  j["observed"] = v.observed;
  j["required"] = v.required;
  return j;
}

ordered_json to_json(const AccuracyReport& m) {
  ordered_json j;
  j["samples"] = m.samples;
  j["acc_clean"] = format_fraction(m.acc_clean);
  j["acc_cert_d"] = format_fraction(m.acc_cert_d);
  j["acc_cert_u"] = format_fraction(m.acc_cert_u);
  j["acc_cert_r"] = format_fraction(m.acc_cert_r);
  return j;
}

std::string dump_report(const ordered_json& report) { return report.dump(2) + "\n"; }

void write_report(const std::filesystem::path& path, const ordered_json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open report for writing");
  out << dump_report(report);
  if (!out) throw FormatError(path.string() + ": write failed");
}

ordered_json read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open report");
  try {
    ordered_json j = ordered_json::parse(in);
    for (const char* key : {"config", "metrics", "records", "violations", "timing_ms"}) {
      if (!j.contains(key)) throw FormatError(path.string() + ": report lacks field '" + key + "'");
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string summarize_report(const ordered_json& report) {
  std::ostringstream s;
  const auto& c = report.at("config");
  const auto& g = c.at("geometry");
  s << "dataset   " << c.at("dataset").get<std::string>() << '\n'
    << "defender  " << c.at("defender").get<std::string>() << "  (mutation " << c.at("mutation").get<std::string>()
    << ")\n"
    << "models    h=" << c.at("classifier_h").get<std::string>() << "  f=" << c.at("classifier_f").get<std::string>()
    << '\n'
    << "geometry  " << g.at("width") << 'x' << g.at("height") << "  p=" << c.at("patch") << " k=" << c.at("masks")
    << " b=" << c.at("ablation") << "  |P|=" << g.at("patches") << " |M|=" << g.at("masks")
    << " |B|=" << g.at("bands") << " delta=" << g.at("delta") << "\n\n";

  const auto& m = report.at("metrics");
  s << "samples     " << m.at("samples") << '\n';
  for (const char* k : {"acc_clean", "acc_cert_d", "acc_cert_u", "acc_cert_r"}) {
    s << std::left << std::setw(12) << k << m.at(k).get<std::string>() << '\n';
  }

  s << '\n' << std::left << std::setw(20) << "sample" << std::setw(7) << "truth" << std::setw(7) << "label"
    << std::setw(6) << "warn" << std::setw(5) << "c_u" << std::setw(5) << "c_d" << std::setw(5) << "c_r"
    << std::setw(6) << "case" << "provenance\n";
  auto flag = [](const ordered_json& b) { return b.get<bool>() ? "y" : "-"; };
  for (const auto& r : report.at("records")) {
    s << std::left << std::setw(20) << r.at("sample_id").get<std::string>() << std::setw(7) << r.at("truth").dump()
      << std::setw(7) << r.at("label").dump() << std::setw(6) << flag(r.at("warning")) << std::setw(5)
      << flag(r.at("c_u")) << std::setw(5) << flag(r.at("c_d")) << std::setw(5) << flag(r.at("c_r")) << std::setw(6)
      << r.at("r1_case").get<std::string>() << r.at("provenance").get<std::string>() << '\n';
  }

  const auto& violations = report.at("violations");
  s << "\nviolations  " << violations.size() << '\n';
  for (const auto& v : violations) {
    s << "  " << v.at("sample_id").get<std::string>() << "  " << v.at("guarantee").get<std::string>() << "  patch "
      << v.at("patch_index") << " content " << v.at("content").dump() << "  observed " << v.at("observed").get<std::string>()
      << "; required " << v.at("required").get<std::string>() << '\n';
  }
  if (report.contains("oracle")) {
    const auto& o = report.at("oracle");
    const auto& d = o.at("differential");
    s << "variants    " << o.at("variants_checked") << " (" << o.at("variants_per_sample") << " per sample)\n"
      << "alg1/alg2   " << d.at("disagreements").size() << " disagreements over " << d.at("inputs_checked")
      << " inputs\n";
  }
  if (!report.at("timing_ms").is_null()) s << "timing_ms   " << report.at("timing_ms") << '\n';
  return s.str();
}

}  // namespace patchcert
