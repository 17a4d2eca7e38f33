#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flowanchor/amm.hpp"
#include "flowanchor/error.hpp"
#include "flowanchor/sar.hpp"

namespace flowanchor {

/// A config error; key_path() names the offending `section.key`.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

struct BackendSpec {
  std::string kind = "gaussian";
  std::string source = "source";
  std::string target = "target";
  std::size_t batch = 1;
  std::size_t channels = 4;
  std::size_t frames = 5;
  std::size_t height = 8;
  std::size_t width = 8;
  // gaussian
  std::vector<double> source_mean{0.0};
  std::vector<double> target_mean{1.0};
  double source_scale = 1.0;
  double target_scale = 1.0;
  // toy_attention
  std::size_t tokens = 6;
  std::size_t key_dim = 8;
  std::size_t layers = 1;
  double temperature = 1.0;
  std::uint64_t model_seed = 7;
  std::uint64_t target_value_seed = 11;

  bool operator==(const BackendSpec&) const = default;
};

struct GridSpec {
  std::size_t steps = 25;
  std::size_t skip = 2;
  std::size_t n_avg = 1;

  bool operator==(const GridSpec&) const = default;
};

struct SarSpec {
  SarConfig config;
  std::vector<std::size_t> target_tokens{0};

  bool operator==(const SarSpec&) const = default;
};

struct IoSpec {
  /// "synth" or a FATN path.
  std::string source = "synth";
  /// "center", "all", "none", "box:f0,f1,h0,h1,w0,w1", or PGM/FATN paths.
  std::string mask_kind = "center";
  std::vector<std::string> mask_paths;
  bool history = true;
  bool contrast_pgm = false;

  bool operator==(const IoSpec&) const = default;
};

struct MetricsSpec {
  /// Subset of psnr, warp, consistency, structure.
  std::vector<std::string> compute{"psnr", "consistency", "structure"};
  double peak = 1.0;
  double binarize_threshold = 0.5;
  std::size_t embed_grid = 4;
  /// Optional FATN flow (F-1, 2, H, W) for warp error.
  std::string flow;
  /// Edited video for the `metrics` command.
  std::string video;

  bool operator==(const MetricsSpec&) const = default;
};

struct RunSpec {
  std::string scenario = "default";
  std::uint64_t seed = 0;
  bool baseline_blend = false;
  BackendSpec backend;
  GridSpec grid;
  SarSpec sar;
  AmmConfig amm;
  IoSpec io;
  MetricsSpec metrics;

  bool operator==(const RunSpec&) const = default;
};

/// Parses the sectioned key-value format:
///
///   # comment
///   scenario = name          (top level: scenario, seed, baseline_blend)
///   [grid]                   (sections: backend grid sar amm io metrics)
///   steps = 25
///
/// Relative paths resolve against `base_dir`. Unknown keys, malformed values
/// and out-of-range values raise ConfigError naming `section.key`.
RunSpec parse_config_text(const std::string& text,
                          const std::filesystem::path& base_dir = {});
RunSpec parse_config(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(emit_config(s)) == s.
std::string emit_config(const RunSpec& spec);

}  // namespace flowanchor
