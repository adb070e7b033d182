// patchcert command-line driver.
//
// Exit status: 0 success, 1 oracle violations, 2 usage or input error, 3 oracle budget exceeded.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patchcert/fixtures.hpp"
#include "patchcert/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kError = 2;
constexpr int kBudget = 3;

struct Common {
  patchcert::RunConfig cfg;
  std::string defender = "cc";
  std::string mutation = "none";
  std::optional<unsigned> labels;
  int timeout_ms = 5000;
  bool no_cache = false;
};

void add_model_options(CLI::App& cmd, Common& c) {
  cmd.add_option("--patch", c.cfg.patch_side, "Patch side p")->required();
  cmd.add_option("--masks", c.cfg.masks_per_axis, "Masks per axis k")->required();
  cmd.add_option("--ablation", c.cfg.band_width, "Column band width b")->required();
  cmd.add_option("--classifier-h", c.cfg.classifier_h, "Masking model: table:PATH | synthetic:NAME | extern:CMD")
      ->required();
  cmd.add_option("--classifier-f", c.cfg.classifier_f, "Voting model: table:PATH | synthetic:NAME | extern:CMD")
      ->required();
  cmd.add_option("--defender", c.defender, "cc or cc-base")->check(CLI::IsMember({"cc", "cc-base"}));
  cmd.add_option("--labels", c.labels, "Label count (default: largest dataset label + 1, at least 2)");
  cmd.add_option("--mutation", c.mutation, "Defender mutation for validator testing");
  cmd.add_option("--extern-timeout-ms", c.timeout_ms, "Per-query timeout for extern: models");
  cmd.add_flag("--no-cache", c.no_cache, "Disable query memoization");
}

void add_dataset_options(CLI::App& cmd, Common& c) {
  cmd.add_option("--dataset", c.cfg.dataset, "Dataset directory (sgf files + labels.csv)")->required();
  cmd.add_flag("--allow-zero", c.cfg.allow_sentinel, "Accept the sentinel value 0 in benign samples");
  cmd.add_flag("--timing", c.cfg.record_timing, "Record wall-clock time in the report");
}

void finish(Common& c) {
  c.cfg.defender = *patchcert::parse_defender_kind(c.defender);
  auto m = patchcert::parse_mutation(c.mutation);
  if (!m) throw patchcert::DomainError("unknown mutation '" + c.mutation + "'");
  c.cfg.mutation = *m;
  if (c.labels) c.cfg.label_count = *c.labels;
  c.cfg.extern_timeout = std::chrono::milliseconds(c.timeout_ms);
  c.cfg.use_cache = !c.no_cache;
  c.cfg.workers = patchcert::workers_from_env(1);
}

void emit(const nlohmann::ordered_json& report, const std::optional<std::filesystem::path>& out) {
  if (out) {
    patchcert::write_report(*out, report);
  } else {
    std::cout << patchcert::dump_report(report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-robustness certification with cross-checked recovery defenders"};
  app.require_subcommand(1);

  Common certify_opts;
  std::optional<std::filesystem::path> certify_out;
  auto* certify = app.add_subcommand("certify", "Certify every sample of a dataset and write a report");
  add_dataset_options(*certify, certify_opts);
  add_model_options(*certify, certify_opts);
  certify->add_option("--out", certify_out, "Report file (default: stdout)");

  Common oracle_opts;
  std::optional<std::filesystem::path> oracle_out;
  std::optional<int> alphabet_max;
  auto* oracle = app.add_subcommand("oracle", "Certify, then check every certificate against exhaustive attacks");
  add_dataset_options(*oracle, oracle_opts);
  add_model_options(*oracle, oracle_opts);
  oracle->add_option("--out", oracle_out, "Report file (default: stdout)");
  oracle->add_option("--alphabet-max", alphabet_max, "Attack content values 0..A (default: dataset A)");
  oracle->add_option("--budget", oracle_opts.cfg.budget, "Maximum variants per sample");
  oracle->add_flag("--exclude-sentinel", oracle_opts.cfg.exclude_sentinel, "Leave 0 out of the attack alphabet");

  Common predict_opts;
  std::filesystem::path image;
  auto* predict = app.add_subcommand("predict", "Predict one sample and print label and warning");
  predict->add_option("--image", image, "Sample file (sgf)")->required()->check(CLI::ExistingFile);
  add_model_options(*predict, predict_opts);

  std::filesystem::path report_path;
  auto* report = app.add_subcommand("report", "Pretty-print a report file");
  report->add_option("file", report_path, "Report JSON")->required();

  std::string fixture_name;
  std::filesystem::path fixture_dir;
  bool fixture_list = false;
  auto* fixture = app.add_subcommand("fixture", "Export a crafted fixture (dataset and table models)");
  fixture->add_option("--name", fixture_name, "Fixture name");
  fixture->add_option("--out", fixture_dir, "Output directory");
  fixture->add_flag("--list", fixture_list, "List fixture names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*certify) {
      finish(certify_opts);
      emit(patchcert::run_certify(certify_opts.cfg).report, certify_out);
      return kOk;
    }
    if (*oracle) {
      finish(oracle_opts);
      oracle_opts.cfg.alphabet_max = alphabet_max;
      const auto result = patchcert::run_oracle(oracle_opts.cfg);
      emit(result.report, oracle_out);
      if (!result.audit.violations.empty()) {
        std::cerr << "patchcert: " << result.audit.violations.size() << " violation(s)\n";
        return kViolations;
      }
      return kOk;
    }
    if (*predict) {
      finish(predict_opts);
      const patchcert::Sample x = patchcert::read_sgf(image);
      const patchcert::Label labels = predict_opts.cfg.label_count.value_or(2);
      patchcert::ExternalOptions ext;
      ext.timeout = predict_opts.cfg.extern_timeout;
      ext.expected_frame = std::pair{x.width(), x.height()};
      const patchcert::Geometry g{x.width(), x.height(), predict_opts.cfg.patch_side,
                                  predict_opts.cfg.masks_per_axis, predict_opts.cfg.band_width};
      patchcert::build_mask_set(g.width, g.height, g.patch_side, g.masks_per_axis);
      const auto pair = patchcert::make_defender_pair(
          g, patchcert::make_classifier_from_spec(predict_opts.cfg.classifier_h, labels, ext),
          patchcert::make_classifier_from_spec(predict_opts.cfg.classifier_f, labels, ext), predict_opts.cfg.mutation);
      const auto p = patchcert::predict(predict_opts.cfg.defender, x, pair);
      std::cout << "label=" << p.label << " warning=" << (p.warning ? "true" : "false")
                << " case=" << patchcert::to_string(p.r1.case_tag) << " g1=" << p.r1.label << " g2=" << p.g2 << '\n';
      return kOk;
    }
    if (*report) {
      std::cout << patchcert::summarize_report(patchcert::read_report(report_path));
      return kOk;
    }
    if (*fixture) {
      if (fixture_list) {
        for (const auto& n : patchcert::fixture_names()) std::cout << n << '\n';
        return kOk;
      }
      if (fixture_name.empty() || fixture_dir.empty()) {
        std::cerr << "patchcert fixture: --name and --out are required unless --list is given\n";
        return kError;
      }
      const auto s = patchcert::make_fixture(fixture_name);
      patchcert::export_scenario(s, fixture_dir);
      std::cout << "patchcert oracle --dataset " << (fixture_dir / "dataset").string() << " --patch "
                << s.geometry.patch_side << " --masks " << s.geometry.masks_per_axis << " --ablation "
                << s.geometry.band_width << " --classifier-h table:" << (fixture_dir / "h.json").string()
                << " --classifier-f table:" << (fixture_dir / "f.json").string() << " --labels " << s.h.label_count
                << " --mutation " << patchcert::to_string(s.mutation) << '\n';
      return kOk;
    }
  } catch (const patchcert::BudgetError& e) {
    std::cerr << "patchcert: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "patchcert: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
