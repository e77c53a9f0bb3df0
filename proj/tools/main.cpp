#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cartanlab/error.hpp"
#include "cartanlab/presets.hpp"
#include "config.hpp"
#include "report.hpp"
#include "suites.hpp"

namespace {

using cartanlab::Err;
using cartanlab::fail;
using cartanlab::cli::Json;
using cartanlab::cli::Report;
using cartanlab::cli::SuiteOptions;

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t pos = 0;
    const std::uint64_t seed = std::stoull(text, &pos, 16);
    if (pos != text.size()) throw std::invalid_argument(text);
    return seed;
  } catch (const std::exception&) {
    fail(Err::ConfigError, "seed \"" + text + "\" is not a hex number");
  }
}

struct Subject {
  std::string label;
  std::optional<Json> config;

  const Json* config_ptr() const { return config ? &*config : nullptr; }
};

Subject resolve_subject(const std::string& preset, const std::string& config_path,
                        bool (*is_builtin)(const std::string&)) {
  if (!config_path.empty()) {
    Json loaded = cartanlab::cli::load_config_file(config_path);
    return {std::filesystem::path(config_path).stem().string(), std::move(loaded)};
  }
  if (preset.empty()) fail(Err::ConfigError, "pass --preset NAME or --config FILE");
  if (is_builtin(preset)) return {preset, std::nullopt};
  const std::string user_path = cartanlab::cli::user_preset_path(preset);
  if (user_path.empty())
    fail(Err::UnknownPreset, "\"" + preset + "\" names no preset; try list-presets");
  return {preset, cartanlab::cli::load_config_file(user_path)};
}

bool is_algebra_preset(const std::string& name) {
  const auto names = cartanlab::algebra_preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

/// prolong and jets accept --group as a shortcut; otherwise the preset is the
/// algebra name itself, with the user directory as fallback.
Subject resolve_group_subject(const std::string& group, const std::string& preset,
                              const std::string& config_path) {
  if (!group.empty() && config_path.empty() && preset.empty())
    return {group, std::nullopt};
  if (!group.empty())
    fail(Err::ConfigError, "--group excludes --preset and --config");
  if (preset.empty() && config_path.empty())
    fail(Err::ConfigError, "pass --group NAME, --preset NAME or --config FILE");
  return resolve_subject(preset, config_path, is_algebra_preset);
}

void print_presets_text(const Json& catalog) {
  std::cout << "connections:\n";
  for (const auto& e : catalog["connections"])
    std::cout << "  " << e["name"].get<std::string>() << "  ("
              << e["kind"].get<std::string>() << ", " << e["pair"].get<std::string>()
              << ")\n";
  std::cout << "gstructures:\n";
  for (const auto& e : catalog["gstructures"])
    std::cout << "  " << e["name"].get<std::string>() << "  (group "
              << e["group"].get<std::string>() << ", dim " << e["v_dim"].get<int>()
              << ")\n";
  std::cout << "algebras:\n ";
  for (const auto& e : catalog["algebras"])
    std::cout << " " << e["name"].get<std::string>();
  std::cout << "\npairs:\n ";
  for (const auto& e : catalog["pairs"])
    std::cout << " " << e["name"].get<std::string>();
  std::cout << "\nuser:\n";
  if (catalog["user"].empty()) {
    std::cout << "  (none; set CARTANLAB_PRESET_DIR to add JSON presets)\n";
  } else {
    for (const auto& e : catalog["user"])
      std::cout << "  " << e.get<std::string>() << "\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for parallelisms, connections and their invariants"};
  app.require_subcommand(1);

  std::string preset, config_path, group;
  std::string format = "text";
  std::string seed_text = "0x5eed";
  SuiteOptions opt;

  const auto add_shared = [&](CLI::App* sub, bool with_subject) {
    if (with_subject) {
      sub->add_option("--preset", preset, "built-in or user preset name");
      sub->add_option("--config", config_path, "JSON config file")
          ->check(CLI::ExistingFile);
    }
    sub->add_option("--samples", opt.samples, "sample count for residual sweeps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed_text, "hex seed for the sampling plans");
    sub->add_option("--tol-scale", opt.tol_scale, "scale every tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* check = app.add_subcommand("check", "validate a connection's defining properties");
  add_shared(check, true);
  CLI::App* develop = app.add_subcommand("develop", "integrate a parallelism along a path");
  add_shared(develop, true);
  develop->add_option("--steps", opt.steps, "integrator step count")
      ->check(CLI::Range(16, 65536));
  CLI::App* chern = app.add_subcommand("chern-weil", "characteristic forms and transgression");
  add_shared(chern, true);
  chern->add_option("--power", opt.power, "trace power of the default invariant")
      ->check(CLI::Range(2, 4));
  CLI::App* extend = app.add_subcommand("extend", "enlarge the structure group and come back");
  add_shared(extend, true);
  CLI::App* prolong = app.add_subcommand("prolong", "prolongation table of a matrix algebra");
  add_shared(prolong, true);
  prolong->add_option("--group", group, "matrix algebra preset");
  prolong->add_option("--k-max", opt.k_max, "deepest prolongation level")
      ->check(CLI::Range(1, 4));
  prolong->add_flag("--strict", opt.strict, "fail when the torsion complement is not invariant");
  CLI::App* gstructure = app.add_subcommand("gstructure", "first order reduction over a chart");
  add_shared(gstructure, true);
  CLI::App* jets = app.add_subcommand("jets", "truncated jet groups and flat model connections");
  add_shared(jets, true);
  jets->add_option("--group", group, "matrix algebra preset");
  jets->add_option("--order", opt.order, "jet truncation order")->check(CLI::Range(1, 3));
  CLI::App* list = app.add_subcommand("list-presets", "show built-in and user presets");
  list->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    opt.seed = parse_seed(seed_text);
    const bool as_json = format == "json";

    if (list->parsed()) {
      if (as_json) {
        Json out;
        out["tool"] = "cartanlab";
        out["suite"] = "list-presets";
        out["presets"] = cartanlab::cli::preset_catalog();
        std::cout << out.dump(2) << "\n";
      } else {
        print_presets_text(cartanlab::cli::preset_catalog());
      }
      return 0;
    }

    Report report;
    if (check->parsed()) {
      const Subject s = resolve_subject(preset, config_path, cartanlab::cli::is_builtin_connection);
      report = cartanlab::cli::run_check(s.label, s.config_ptr(), opt);
    } else if (develop->parsed()) {
      const Subject s = resolve_subject(preset, config_path, cartanlab::cli::is_builtin_connection);
      report = cartanlab::cli::run_develop(s.label, s.config_ptr(), opt);
    } else if (chern->parsed()) {
      const Subject s = resolve_subject(preset, config_path, cartanlab::cli::is_builtin_connection);
      report = cartanlab::cli::run_chern_weil(s.label, s.config_ptr(), opt);
    } else if (extend->parsed()) {
      const Subject s = resolve_subject(preset, config_path, cartanlab::cli::is_builtin_connection);
      report = cartanlab::cli::run_extend(s.label, s.config_ptr(), opt);
    } else if (prolong->parsed()) {
      const Subject s = resolve_group_subject(group, preset, config_path);
      report = cartanlab::cli::run_prolong(s.label, s.config_ptr(), opt);
    } else if (gstructure->parsed()) {
      const Subject s = resolve_subject(preset, config_path, cartanlab::cli::is_builtin_gstructure);
      report = cartanlab::cli::run_gstructure(s.label, s.config_ptr(), opt);
    } else if (jets->parsed()) {
      const Subject s = resolve_group_subject(group, preset, config_path);
      report = cartanlab::cli::run_jets(s.label, s.config_ptr(), opt);
    }

    std::cout << (as_json ? report.to_json() : report.to_text());
    return report.failed() ? 1 : 0;
  } catch (const cartanlab::Error& e) {
    std::cerr << "cartanlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cartanlab: " << e.what() << "\n";
    return 2;
  }
}
