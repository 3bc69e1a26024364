#pragma once

// Run configuration: a flat key-value file whose entries can be overridden
// from the command line. Every key has a default; the defaults follow the
// reference hyperparameter tables (5 Procrustes iterations, 50000 induced
// pairs, 5 x 100000 adversarial steps, batch 32, beta 0.001, a two hidden
// layer 2048-unit LeakyReLU discriminator with input dropout 0.1).

#include "bli/adversarial.hpp"
#include "bli/eval.hpp"
#include "bli/procrustes.hpp"
#include "bli/refine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bli {

enum class Direction { Forward, Backward, Both };

struct RunConfig {
  std::filesystem::path src;
  std::filesystem::path tgt;
  std::string src_lang = "src";
  std::string tgt_lang = "tgt";
  std::filesystem::path seed_dict;
  std::filesystem::path test_dict;
  std::filesystem::path output_dir;
  /// Mapping to start from instead of running adversarial training.
  std::filesystem::path adversarial_checkpoint;

  Method method = Method::SemiSup;
  Direction direction = Direction::Forward;
  std::size_t max_vocab = 200000;
  bool normalize = true;

  ProcrustesConfig procrustes;
  AdversarialConfig adversarial;
  std::size_t s_anchor_pairs = 5000;

  RefineConfig refine() const { return {s_anchor_pairs, procrustes}; }

  /// Checks that referenced paths exist and method-specific fields are set.
  /// Throws ValidationError.
  void validate() const;
};

using Setting = std::pair<std::string, std::string>;

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ValidationError on an unknown key
/// or a value of the wrong type.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads "key = value" lines ('#' starts a comment).
std::vector<Setting> read_config_file(const std::filesystem::path& path);

/// Defaults, then the file (if any), then the overrides in order.
RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<Setting>& overrides);

}  // namespace bli
