#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "offail/experiment.hpp"
#include "offail/gridworld.hpp"
#include "offail/policy_update.hpp"

namespace offail {

SigmaPreset parse_sigma_preset(std::string_view name) {
  if (name == "theory") return SigmaPreset::kTheory;
  if (name == "minigrid") return SigmaPreset::kMinigrid;
  throw InvalidConfig("unknown sigma preset '" + std::string(name) +
                      "' (expected theory or minigrid)");
}

std::string_view to_string(SigmaPreset preset) {
  return preset == SigmaPreset::kTheory ? "theory" : "minigrid";
}

double RunConfig::resolved_sigma() const {
  if (sigma) return *sigma;
  const std::size_t h = resolved_horizon();
  switch (sigma_preset) {
    case SigmaPreset::kTheory:
      return theory_sigma(static_cast<double>(kGridActions), h, iterations);
    case SigmaPreset::kMinigrid:
      return 10.0 * theory_sigma(4.0, h, iterations);
  }
  throw InvalidConfig("unknown sigma preset");
}

double RunConfig::resolved_eta() const {
  if (eta) return *eta;
  return theory_eta(iterations, eta_preset, room_side * room_side, kGridActions);
}

void RunConfig::validate() const {
  if (room_side < 2) throw InvalidConfig("room_side must be >= 2");
  if (resolved_horizon() < 1) throw InvalidConfig("horizon must be >= 1");
  if (iterations < 1) throw InvalidConfig("iterations K must be >= 1");
  if (batch_b < 1) throw InvalidConfig("batch_b B must be >= 1");
  if (window_n < 1 || window_n > iterations) {
    throw InvalidConfig("window_n N must satisfy 1 <= N <= K (N=" + std::to_string(window_n) +
                        ", K=" + std::to_string(iterations) + ")");
  }
  if (sigma && (!(*sigma > 0.0) || !std::isfinite(*sigma))) {
    throw InvalidConfig("sigma must be > 0");
  }
  if (eta && (!(*eta > 0.0) || !std::isfinite(*eta))) throw InvalidConfig("eta must be > 0");
  BonusConfig{bonus_cb, delta, iterations}.validate();
  if (seeds.empty()) throw InvalidConfig("seeds must list at least one seed");
  if (eval_every < 1) throw InvalidConfig("eval_every must be >= 1");
  if (eval_episodes < 1) throw InvalidConfig("eval_episodes must be >= 1");
  if (buffer_capacity > 0) {
    if (buffer_capacity < batch_b) throw InvalidConfig("buffer_capacity must be >= batch_b");
    if (minibatch < 1) throw InvalidConfig("minibatch must be >= 1 in capacity mode");
  }
  if (exact_gradient && buffer_capacity > 0) {
    throw InvalidConfig("exact_gradient needs the policy-window buffer (buffer_capacity = 0)");
  }
}

void apply_preset(RunConfig& config, std::string_view name) {
  if (name != "minigrid-c1") {
    throw InvalidConfig("unknown preset '" + std::string(name) + "' (expected minigrid-c1)");
  }
  config.preset = std::string(name);
  config.sigma_preset = SigmaPreset::kMinigrid;
  config.eta_preset = EtaPreset::kMinigrid;
  config.buffer_capacity = 128;
  config.minibatch = 32;
  config.known_transitions = true;
  config.horizon.reset();
  config.eval_episodes = 5;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct LineError {
  std::size_t line;
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidConfig("config line " + std::to_string(line) + ": " + msg);
  }
};

std::size_t parse_count(std::string_view v, const LineError& at) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    at.fail("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view v, const LineError& at) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    at.fail("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, const LineError& at) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  at.fail("expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::uint64_t> parse_seed_list(std::string_view v, const LineError& at) {
  std::vector<std::uint64_t> seeds;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), seed);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      at.fail("bad seed '" + std::string(item) + "'");
    }
    seeds.push_back(seed);
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return seeds;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  // key -> (value, line); the preset is applied before the explicit keys.
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const LineError at{line_no};
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) at.fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for key '" + key + "'");
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      at.fail("duplicate key '" + key + "'");
    }
  }

  RunConfig config;
  if (const auto it = entries.find("preset"); it != entries.end()) {
    try {
      apply_preset(config, it->second.first);
    } catch (const InvalidConfig& e) {
      LineError{it->second.second}.fail(e.what());
    }
  }

  bool have_side = false;
  bool have_iters = false;
  for (const auto& [key, entry] : entries) {
    const auto& [value, line] = entry;
    const LineError at{line};
    if (key == "preset") {
      continue;
    } else if (key == "room_side") {
      config.room_side = parse_count(value, at);
      have_side = true;
    } else if (key == "horizon") {
      config.horizon = parse_count(value, at);
    } else if (key == "iterations") {
      config.iterations = parse_count(value, at);
      have_iters = true;
    } else if (key == "batch_b") {
      config.batch_b = parse_count(value, at);
    } else if (key == "window_n") {
      config.window_n = parse_count(value, at);
    } else if (key == "sigma") {
      config.sigma = parse_real(value, at);
    } else if (key == "sigma_preset") {
      try {
        config.sigma_preset = parse_sigma_preset(value);
      } catch (const InvalidConfig& e) {
        at.fail(e.what());
      }
    } else if (key == "eta") {
      config.eta = parse_real(value, at);
    } else if (key == "eta_preset") {
      try {
        config.eta_preset = parse_eta_preset(value);
      } catch (const InvalidConfig& e) {
        at.fail(e.what());
      }
    } else if (key == "known_transitions") {
      config.known_transitions = parse_bool(value, at);
    } else if (key == "bonus_cb") {
      config.bonus_cb = parse_real(value, at);
    } else if (key == "delta") {
      config.delta = parse_real(value, at);
    } else if (key == "seeds") {
      config.seeds = parse_seed_list(value, at);
    } else if (key == "eval_every") {
      config.eval_every = parse_count(value, at);
    } else if (key == "eval_episodes") {
      config.eval_episodes = parse_count(value, at);
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else if (key == "buffer_capacity") {
      config.buffer_capacity = parse_count(value, at);
    } else if (key == "minibatch") {
      config.minibatch = parse_count(value, at);
    } else if (key == "expert_trajectories") {
      config.expert_trajectories = parse_count(value, at);
    } else if (key == "exact_gradient") {
      config.exact_gradient = parse_bool(value, at);
    } else {
      at.fail("unknown key '" + key + "'");
    }
  }
  if (!have_side || !have_iters) {
    throw InvalidConfig("config must set room_side and iterations");
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace offail
