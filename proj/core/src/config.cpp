#include "flowanchor/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "flowanchor/sweep.hpp"

namespace flowanchor {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected at least one number");
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(v)) out.push_back(to_size(key, item));
  return out;
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

void require_exists(const std::string& key, const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(key, "file not found: " + path);
  }
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(items[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

using Setter = std::function<void(RunSpec&, const std::string& key,
                                  const std::string& value)>;

std::map<std::string, Setter> make_setters(const std::filesystem::path& base) {
  std::map<std::string, Setter> table;
  auto& t = table;
  t["scenario"] = [](RunSpec& s, auto&, auto& v) { s.scenario = v; };
  t["seed"] = [](RunSpec& s, auto& k, auto& v) { s.seed = to_u64(k, v); };
  t["baseline_blend"] = [](RunSpec& s, auto& k, auto& v) { s.baseline_blend = to_bool(k, v); };

  t["backend.kind"] = [](RunSpec& s, auto&, auto& v) { s.backend.kind = v; };
  t["backend.source"] = [](RunSpec& s, auto&, auto& v) { s.backend.source = v; };
  t["backend.target"] = [](RunSpec& s, auto&, auto& v) { s.backend.target = v; };
  t["backend.batch"] = [](RunSpec& s, auto& k, auto& v) { s.backend.batch = to_size(k, v); };
  t["backend.channels"] = [](RunSpec& s, auto& k, auto& v) { s.backend.channels = to_size(k, v); };
  t["backend.frames"] = [](RunSpec& s, auto& k, auto& v) { s.backend.frames = to_size(k, v); };
  t["backend.height"] = [](RunSpec& s, auto& k, auto& v) { s.backend.height = to_size(k, v); };
  t["backend.width"] = [](RunSpec& s, auto& k, auto& v) { s.backend.width = to_size(k, v); };
  t["backend.source_mean"] = [](RunSpec& s, auto& k, auto& v) { s.backend.source_mean = to_doubles(k, v); };
  t["backend.target_mean"] = [](RunSpec& s, auto& k, auto& v) { s.backend.target_mean = to_doubles(k, v); };
  t["backend.source_scale"] = [](RunSpec& s, auto& k, auto& v) { s.backend.source_scale = to_double(k, v); };
  t["backend.target_scale"] = [](RunSpec& s, auto& k, auto& v) { s.backend.target_scale = to_double(k, v); };
  t["backend.tokens"] = [](RunSpec& s, auto& k, auto& v) { s.backend.tokens = to_size(k, v); };
  t["backend.key_dim"] = [](RunSpec& s, auto& k, auto& v) { s.backend.key_dim = to_size(k, v); };
  t["backend.layers"] = [](RunSpec& s, auto& k, auto& v) { s.backend.layers = to_size(k, v); };
  t["backend.temperature"] = [](RunSpec& s, auto& k, auto& v) { s.backend.temperature = to_double(k, v); };
  t["backend.model_seed"] = [](RunSpec& s, auto& k, auto& v) { s.backend.model_seed = to_u64(k, v); };
  t["backend.target_value_seed"] = [](RunSpec& s, auto& k, auto& v) { s.backend.target_value_seed = to_u64(k, v); };

  t["grid.steps"] = [](RunSpec& s, auto& k, auto& v) { s.grid.steps = to_size(k, v); };
  t["grid.skip"] = [](RunSpec& s, auto& k, auto& v) { s.grid.skip = to_size(k, v); };
  t["grid.n_avg"] = [](RunSpec& s, auto& k, auto& v) { s.grid.n_avg = to_size(k, v); };

  t["sar.enabled"] = [](RunSpec& s, auto& k, auto& v) { s.sar.config.enabled = to_bool(k, v); };
  t["sar.beta1"] = [](RunSpec& s, auto& k, auto& v) { s.sar.config.beta1 = to_double(k, v); };
  t["sar.beta2"] = [](RunSpec& s, auto& k, auto& v) { s.sar.config.beta2 = to_double(k, v); };
  t["sar.tau_fraction"] = [](RunSpec& s, auto& k, auto& v) { s.sar.config.tau_fraction = to_double(k, v); };
  t["sar.layers"] = [](RunSpec& s, auto& k, auto& v) {
    if (v == "all") {
      s.sar.config.layers.reset();
    } else if (v == "none") {
      s.sar.config.layers = std::set<std::size_t>{};
    } else {
      const auto items = to_sizes(k, v);
      s.sar.config.layers = std::set<std::size_t>(items.begin(), items.end());
    }
  };
  t["sar.target_tokens"] = [](RunSpec& s, auto& k, auto& v) { s.sar.target_tokens = to_sizes(k, v); };

  t["amm.enabled"] = [](RunSpec& s, auto& k, auto& v) { s.amm.enabled = to_bool(k, v); };
  t["amm.gamma"] = [](RunSpec& s, auto& k, auto& v) { s.amm.gamma = to_double(k, v); };
  t["amm.f0"] = [](RunSpec& s, auto& k, auto& v) { s.amm.f0 = to_size(k, v); };
  t["amm.epsilon"] = [](RunSpec& s, auto& k, auto& v) { s.amm.epsilon = to_double(k, v); };

  t["io.source"] = [base](RunSpec& s, auto& k, auto& v) {
    if (v == "synth") {
      s.io.source = v;
    } else {
      s.io.source = resolve(base, v);
      require_exists(k, s.io.source);
    }
  };
  t["io.mask"] = [base](RunSpec& s, auto& k, auto& v) {
    s.io.mask_paths.clear();
    if (v == "center" || v == "all" || v == "none") {
      s.io.mask_kind = v;
    } else if (v.rfind("box:", 0) == 0) {
      if (to_sizes(k, v.substr(4)).size() != 6) {
        throw ConfigError(k, "box mask needs six bounds f0,f1,h0,h1,w0,w1");
      }
      s.io.mask_kind = v;
    } else {
      s.io.mask_kind = "files";
      for (const auto& item : split_list(v)) {
        s.io.mask_paths.push_back(resolve(base, item));
        require_exists(k, s.io.mask_paths.back());
      }
      if (s.io.mask_paths.empty()) throw ConfigError(k, "expected at least one mask file");
    }
  };
  t["io.history"] = [](RunSpec& s, auto& k, auto& v) { s.io.history = to_bool(k, v); };
  t["io.contrast_pgm"] = [](RunSpec& s, auto& k, auto& v) { s.io.contrast_pgm = to_bool(k, v); };

  t["metrics.compute"] = [](RunSpec& s, auto& k, auto& v) {
    static const std::set<std::string> known{"psnr", "warp", "consistency", "structure"};
    s.metrics.compute.clear();
    for (const auto& item : split_list(v)) {
      if (item == "none") continue;
      if (!known.contains(item)) throw ConfigError(k, "unknown metric '" + item + "'");
      s.metrics.compute.push_back(item);
    }
  };
  t["metrics.peak"] = [](RunSpec& s, auto& k, auto& v) { s.metrics.peak = to_double(k, v); };
  t["metrics.binarize_threshold"] = [](RunSpec& s, auto& k, auto& v) {
    s.metrics.binarize_threshold = to_double(k, v);
  };
  t["metrics.embed_grid"] = [](RunSpec& s, auto& k, auto& v) { s.metrics.embed_grid = to_size(k, v); };
  t["metrics.flow"] = [base](RunSpec& s, auto& k, auto& v) {
    s.metrics.flow = resolve(base, v);
    require_exists(k, s.metrics.flow);
  };
  t["metrics.video"] = [base](RunSpec& s, auto&, auto& v) { s.metrics.video = resolve(base, v); };
  return table;
}

void range(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

bool is_name(const std::string& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  }) && v != "." && v != "..";
}

void validate(const RunSpec& s) {
  const BackendSpec& b = s.backend;
  const char* name_rule = "must be a non-empty name of letters, digits, '_', '-' or '.'";
  range(is_name(s.scenario), "scenario", name_rule);
  range(is_name(b.kind), "backend.kind", name_rule);
  range(b.batch >= 1, "backend.batch", "must be >= 1");
  range(b.channels >= 1, "backend.channels", "must be >= 1");
  range(b.frames >= 1, "backend.frames", "must be >= 1");
  range(b.height >= 1, "backend.height", "must be >= 1");
  range(b.width >= 1, "backend.width", "must be >= 1");
  range(is_name(b.source), "backend.source", name_rule);
  range(is_name(b.target), "backend.target", name_rule);
  range(b.source_mean.size() == 1 || b.source_mean.size() == b.channels,
        "backend.source_mean", "needs 1 or `channels` values");
  range(b.target_mean.size() == 1 || b.target_mean.size() == b.channels,
        "backend.target_mean", "needs 1 or `channels` values");
  range(b.source_scale > 0.0, "backend.source_scale", "must be > 0");
  range(b.target_scale > 0.0, "backend.target_scale", "must be > 0");
  range(b.tokens >= 1, "backend.tokens", "must be >= 1");
  range(b.key_dim >= 1, "backend.key_dim", "must be >= 1");
  range(b.layers >= 1, "backend.layers", "must be >= 1");
  range(b.temperature > 0.0, "backend.temperature", "must be > 0");

  range(s.grid.steps >= 1, "grid.steps", "must be >= 1");
  range(s.grid.skip < s.grid.steps, "grid.skip", "must be smaller than grid.steps");
  range(s.grid.n_avg >= 1, "grid.n_avg", "must be >= 1");

  range(s.sar.config.beta1 >= 0.0 && s.sar.config.beta1 <= 1.0, "sar.beta1", "must lie in [0, 1]");
  range(s.sar.config.beta2 >= 0.0 && s.sar.config.beta2 <= 1.0, "sar.beta2", "must lie in [0, 1]");
  range(s.sar.config.tau_fraction > 0.0 && s.sar.config.tau_fraction <= 1.0,
        "sar.tau_fraction", "must lie in (0, 1]");
  range(!s.sar.target_tokens.empty(), "sar.target_tokens", "must not be empty");

  range(s.amm.gamma >= 0.0, "amm.gamma", "must be >= 0");
  range(s.amm.f0 >= 2, "amm.f0", "must be >= 2");
  range(s.amm.epsilon > 0.0, "amm.epsilon", "must be > 0");

  range(s.metrics.peak > 0.0, "metrics.peak", "must be > 0");
  range(s.metrics.binarize_threshold >= 0.0 && s.metrics.binarize_threshold <= 1.0,
        "metrics.binarize_threshold", "must lie in [0, 1]");
  range(s.metrics.embed_grid >= 1, "metrics.embed_grid", "must be >= 1");
}

}  // namespace

RunSpec parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunSpec spec;
  static const std::set<std::string> sections{"backend", "grid", "sar", "amm", "io", "metrics"};
  const auto table = make_setters(base_dir);
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.contains(section)) {
        throw ConfigError(section, "unknown section on line " + std::to_string(line_no));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    auto it = table.find(path);
    if (it == table.end()) throw ConfigError(path, "unknown key");
    if (!seen.insert(path).second) throw ConfigError(path, "duplicate key");
    if (value.empty()) throw ConfigError(path, "missing value");
    it->second(spec, path, value);
  }
  validate(spec);
  return spec;
}

RunSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::filesystem::absolute(path).parent_path());
}

std::string emit_config(const RunSpec& s) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto b2s = [](bool v) { return std::string(v ? "true" : "false"); };
  const BackendSpec& b = s.backend;

  kv("scenario", s.scenario);
  kv("seed", std::to_string(s.seed));
  kv("baseline_blend", b2s(s.baseline_blend));

  out << "\n[backend]\n";
  kv("kind", b.kind);
  kv("source", b.source);
  kv("target", b.target);
  kv("batch", std::to_string(b.batch));
  kv("channels", std::to_string(b.channels));
  kv("frames", std::to_string(b.frames));
  kv("height", std::to_string(b.height));
  kv("width", std::to_string(b.width));
  kv("source_mean", join(b.source_mean));
  kv("target_mean", join(b.target_mean));
  kv("source_scale", format_double(b.source_scale));
  kv("target_scale", format_double(b.target_scale));
  kv("tokens", std::to_string(b.tokens));
  kv("key_dim", std::to_string(b.key_dim));
  kv("layers", std::to_string(b.layers));
  kv("temperature", format_double(b.temperature));
  kv("model_seed", std::to_string(b.model_seed));
  kv("target_value_seed", std::to_string(b.target_value_seed));

  out << "\n[grid]\n";
  kv("steps", std::to_string(s.grid.steps));
  kv("skip", std::to_string(s.grid.skip));
  kv("n_avg", std::to_string(s.grid.n_avg));

  out << "\n[sar]\n";
  kv("enabled", b2s(s.sar.config.enabled));
  kv("beta1", format_double(s.sar.config.beta1));
  kv("beta2", format_double(s.sar.config.beta2));
  kv("tau_fraction", format_double(s.sar.config.tau_fraction));
  if (s.sar.config.layers && s.sar.config.layers->empty()) {
    kv("layers", "none");
  } else if (s.sar.config.layers) {
    kv("layers", join(std::vector<std::size_t>(s.sar.config.layers->begin(),
                                               s.sar.config.layers->end())));
  } else {
    kv("layers", "all");
  }
  kv("target_tokens", join(s.sar.target_tokens));

  out << "\n[amm]\n";
  kv("enabled", b2s(s.amm.enabled));
  kv("gamma", format_double(s.amm.gamma));
  kv("f0", std::to_string(s.amm.f0));
  kv("epsilon", format_double(s.amm.epsilon));

  out << "\n[io]\n";
  kv("source", s.io.source);
  kv("mask", s.io.mask_kind == "files" ? join(s.io.mask_paths) : s.io.mask_kind);
  kv("history", b2s(s.io.history));
  kv("contrast_pgm", b2s(s.io.contrast_pgm));

  out << "\n[metrics]\n";
  kv("compute", s.metrics.compute.empty() ? std::string("none") : join(s.metrics.compute));
  kv("peak", format_double(s.metrics.peak));
  kv("binarize_threshold", format_double(s.metrics.binarize_threshold));
  kv("embed_grid", std::to_string(s.metrics.embed_grid));
  if (!s.metrics.flow.empty()) kv("flow", s.metrics.flow);
  if (!s.metrics.video.empty()) kv("video", s.metrics.video);
  return out.str();
}

}  // namespace flowanchor
