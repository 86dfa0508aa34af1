#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offail/reward_update.hpp"

namespace offail {

enum class SigmaPreset {
  kTheory,    ///< sqrt(2 log A / (H^2 K))
  kMinigrid,  ///< 10 * sqrt(2 log 4 / (H^2 K))
};

SigmaPreset parse_sigma_preset(std::string_view name);
std::string_view to_string(SigmaPreset preset);

struct RunConfig {
  std::optional<std::string> preset;
  std::size_t room_side = 0;
  std::optional<std::size_t> horizon;
  std::size_t iterations = 0;
  std::size_t batch_b = 1;
  std::size_t window_n = 1;
  std::optional<double> sigma;
  SigmaPreset sigma_preset = SigmaPreset::kTheory;
  std::optional<double> eta;
  EtaPreset eta_preset = EtaPreset::kInvSqrtK;
  bool known_transitions = false;
  double bonus_cb = 1.0;
  double delta = 0.1;
  std::vector<std::uint64_t> seeds{0};
  std::size_t eval_every = 1;
  std::size_t eval_episodes = 5;
  std::string out_dir = "out";

  /// > 0 switches the reward buffer to capacity mode with minibatch reads.
  std::size_t buffer_capacity = 0;
  std::size_t minibatch = 0;
  /// 0: exact expert occupancy. Otherwise the expert occupancy is the
  /// empirical frequency of this many sampled demonstrations.
  std::size_t expert_trajectories = 0;
  /// Replace the buffered estimate by the exact mixture of the last N
  /// policies' occupancies.
  bool exact_gradient = false;

  bool mc_eval = false;
  bool test_mode = false;

  std::size_t resolved_horizon() const { return horizon.value_or(3 * room_side); }
  double resolved_sigma() const;
  double resolved_eta() const;

  /// Throws InvalidConfig on any violated invariant.
  void validate() const;
};

/// Fill the values of a named preset ("minigrid-c1").
void apply_preset(RunConfig& config, std::string_view name);

/**
 * Parse `key = value` lines; `#` starts a comment. Unknown and duplicate keys
 * are errors, as is a file that leaves room_side or iterations unset. Errors
 * are InvalidConfig with the offending line number.
 */
RunConfig parse_config(std::string_view text);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t iter = 0;
  std::size_t interactions = 0;  ///< iter * B * H
  double eval_return = 0.0;
  double exact_j = 0.0;
  double exact_l = 0.0;
  double tv_slack = 0.0;  ///< A*H*sigma minus the largest step TV since the previous record
  double policy_regret = 0.0;
  double reward_regret = 0.0;
  double ail_regret = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "seed,iter,interactions,eval_return,exact_J,exact_L,tv_slack_max,policy_regret_cum,"
    "reward_regret_cum,ail_regret_cum";

/// Algorithm loop for one seed. Ordering per iteration: sample B episodes
/// with the current policy, buffer them, reward step, count update, optimistic
/// Q recursion, mirror-descent step. test_mode raises InvariantViolation on
/// a failed step-TV or occupancy-shift check.
std::vector<RunRecord> run_seed(const RunConfig& config, std::uint64_t seed);

/// Every configured seed in order.
std::vector<RunRecord> run_experiment(const RunConfig& config);

/// First record whose eval_return reaches `threshold`, if any.
std::optional<RunRecord> first_reaching(const std::vector<RunRecord>& records, double threshold);

std::string format_double(double x);
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::string to_csv(const std::vector<RunRecord>& records);
/// Throws IoError.
void write_csv_file(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// Mean and population standard deviation across seeds of one evaluation point.
struct AggregatePoint {
  std::size_t iter = 0;
  std::size_t interactions = 0;
  std::size_t seeds = 0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  double exact_j_mean = 0.0;
  double exact_j_std = 0.0;
  double ail_regret_mean = 0.0;
  double ail_regret_std = 0.0;
};

inline constexpr std::string_view kAggregateHeader =
    "window_n,iter,interactions,seeds,eval_return_mean,eval_return_std,exact_J_mean,exact_J_std,"
    "ail_regret_mean,ail_regret_std";

/// Records of several seeds grouped by iteration. Seeds must share the schedule.
std::vector<AggregatePoint> aggregate(const std::vector<std::vector<RunRecord>>& per_seed);
std::string to_aggregate_csv(std::size_t window_n, const std::vector<AggregatePoint>& points);

struct SweepCell {
  std::size_t window_n = 0;
  std::uint64_t seed = 0;
  std::filesystem::path csv_path;
  std::vector<RunRecord> records;
  std::optional<std::string> error;
  int error_code = 0;  ///< CLI exit code class of the failure
};

struct SweepResult {
  std::vector<SweepCell> cells;  ///< window-major, seeds in config order
  std::vector<std::filesystem::path> aggregate_paths;
  bool ok() const;
};

/**
 * Run every (N, seed) cell, writing run_n<N>_seed<S>.csv per cell and
 * aggregate_n<N>.csv per window into out_dir. Cells run on up to `threads`
 * workers (0 picks the hardware concurrency); a failing cell is reported in
 * its SweepCell and does not stop the others. Configurations are validated
 * before any cell runs.
 */
SweepResult sweep(const RunConfig& config, const std::vector<std::size_t>& windows,
                  std::size_t threads = 0);

}  // namespace offail
