#pragma once

#include <filesystem>
#include <string>

#include "tumorfa/sampler.hpp"
#include "tumorfa/types.hpp"

namespace tumorfa {

enum class RunMode { kFit, kSimulate, kSummarize, kDiagnose };

struct RunConfig {
  std::string data_path;
  std::string output_dir;
  Hyperparams hyperparams;
  McmcConfig mcmc;
  int chains = 1;
  RunMode mode = RunMode::kFit;

  /// Checks the numeric blocks and that the files the mode reads exist.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sets one dotted key, e.g. "hyperparams.alpha" or "mcmc.iterations".
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; '#' starts a comment. Unknown keys are errors.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// The inverse of apply_config_file for every key.
std::string format_config(const RunConfig& cfg);

}  // namespace tumorfa
