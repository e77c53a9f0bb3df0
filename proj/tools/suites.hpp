#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace cartanlab::cli {

struct SuiteOptions {
  int samples = 32;
  std::uint64_t seed = 0x5EED;
  double tol_scale = 1.0;
  int steps = 512;
  int power = 2;
  int k_max = 2;
  int order = 1;
  bool strict = false;
};

bool is_builtin_connection(const std::string& name);
bool is_builtin_gstructure(const std::string& name);

/// Stable catalog of everything --preset accepts, plus the user directory.
Json preset_catalog();

/// Each runner takes a subject label plus an optional config (null means the
/// subject names a built-in preset).
Report run_check(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_develop(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_chern_weil(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_extend(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_prolong(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_gstructure(const std::string& subject, const Json* config, const SuiteOptions& opt);
Report run_jets(const std::string& subject, const Json* config, const SuiteOptions& opt);

} // namespace cartanlab::cli
