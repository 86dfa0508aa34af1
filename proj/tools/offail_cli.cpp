// Command-line front end: run, sweep and check.
//
// Exit codes: 0 success, 1 config error, 2 invariant violation, 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "offail/experiment.hpp"
#include "offail/gridworld.hpp"
#include "offail/oracles.hpp"
#include "offail/policy_update.hpp"
#include "offail/random_instances.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitIo = 3;

std::vector<std::size_t> parse_window_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    std::size_t n = 0;
    try {
      n = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size()) {
      throw offail::InvalidConfig("--n-list: bad entry '" + item + "'");
    }
    out.push_back(n);
  }
  if (out.empty()) throw offail::InvalidConfig("--n-list is empty");
  return out;
}

// Oracle suite on the configured room; returns the number of failed checks.
int run_checks(const offail::RunConfig& config) {
  using namespace offail;
  const EmptyRoomSpec room{config.room_side, config.horizon};
  const TabularMDP mdp = build_empty_room(room);
  const Shape shape = mdp.shape();
  Rng rng(config.seeds.front());
  int failures = 0;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!pass) ++failures;
  };

  const Policy expert = build_expert(room);
  const double j_fwd = policy_value(mdp, expert, mdp.true_reward());
  const double j_bwd = policy_value_backward(mdp, expert, mdp.true_reward());
  report("expert-return", std::abs(j_fwd - expert_return(room)) < 1e-9 &&
                              std::abs(j_fwd - j_bwd) < 1e-9,
         "J=" + format_double(j_fwd));

  int shift_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto r = check_occupancy_shift(mdp, random_policy(shape, rng), random_policy(shape, rng));
    if (!r.pass) ++shift_bad;
  }
  report("occupancy-shift-bound", shift_bad == 0, std::to_string(shift_bad) + "/200 violations");

  int mix_bad = 0;
  double mix_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<Policy> policies;
    for (std::size_t j = 0; j < n; ++j) policies.push_back(random_policy(shape, rng));
    const auto w = random_simplex(n, rng);
    const auto r = check_mixture_policy(mdp, policies, w);
    mix_err = std::max(mix_err, r.max_abs_error);
    if (!r.pass) ++mix_bad;
  }
  report("mixture-policy", mix_bad == 0, "max error " + format_double(mix_err));

  const double sigma = config.resolved_sigma();
  int step_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Policy p = random_policy(shape, rng);
    StepTable q(shape);
    for (std::size_t h = 0; h < shape.horizon; ++h) {
      for (std::size_t s = 0; s < shape.states; ++s) {
        for (std::size_t a = 0; a < shape.actions; ++a) {
          q(h, s, a) = rng.uniform() * static_cast<double>(shape.horizon - h);
        }
      }
    }
    const auto r = check_policy_step(p, mirror_descent_step(p, q, sigma), sigma, shape.actions,
                                     shape.horizon);
    if (!r.pass) ++step_bad;
  }
  report("policy-step-tv", step_bad == 0, "sigma=" + format_double(sigma));
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy adversarial imitation learning on tabular gridworlds"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  bool mc_eval = false;
  bool test_mode = false;
  std::string n_list;

  app.add_option("--seed-override", seed_override, "Run only this seed");
  app.add_option("--out", out_override, "Output directory (overrides out_dir)");

  auto* run = app.add_subcommand("run", "Train on every configured seed and write run.csv");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_flag("--mc-eval", mc_eval, "Monte Carlo evaluation over eval_episodes episodes");
  run->add_flag("--test-mode", test_mode, "Check theoretical invariants every iteration");
  run->add_option("--seed-override", seed_override, "Run only this seed");
  run->add_option("--out", out_override, "Output directory (overrides out_dir)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the window N over all seeds");
  sweep_cmd->add_option("--config", config_path, "Config file")->required();
  sweep_cmd->add_option("--n-list", n_list, "Comma-separated window sizes")->required();
  sweep_cmd->add_flag("--mc-eval", mc_eval, "Monte Carlo evaluation");
  sweep_cmd->add_flag("--test-mode", test_mode, "Check theoretical invariants every iteration");
  sweep_cmd->add_option("--seed-override", seed_override, "Run only this seed");
  sweep_cmd->add_option("--out", out_override, "Output directory (overrides out_dir)");

  auto* check = app.add_subcommand("check", "Run the exact oracle suite only");
  check->add_option("--config", config_path, "Config file")->required();
  check->add_option("--seed-override", seed_override, "Seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    offail::RunConfig config = offail::load_config(config_path);
    if (seed_override) config.seeds = {*seed_override};
    if (out_override) config.out_dir = *out_override;
    config.mc_eval = mc_eval;
    config.test_mode = test_mode;
    config.validate();

    if (*run) {
      const auto records = offail::run_experiment(config);
      const auto path = std::filesystem::path(config.out_dir) / "run.csv";
      offail::write_csv_file(path, records);
      std::cout << "wrote " << records.size() << " records to " << path.string() << '\n';
      return kExitOk;
    }
    if (*sweep_cmd) {
      const auto result = offail::sweep(config, parse_window_list(n_list));
      int code = kExitOk;
      for (const auto& cell : result.cells) {
        if (cell.error) {
          std::cerr << "cell N=" << cell.window_n << " seed=" << cell.seed
                    << " failed: " << *cell.error << '\n';
          if (code == kExitOk) code = cell.error_code;
        } else {
          std::cout << "wrote " << cell.csv_path.string() << '\n';
        }
      }
      for (const auto& p : result.aggregate_paths) std::cout << "wrote " << p.string() << '\n';
      return code;
    }
    if (*check) return run_checks(config) == 0 ? kExitOk : kExitInvariant;
  } catch (const offail::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const offail::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const offail::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
