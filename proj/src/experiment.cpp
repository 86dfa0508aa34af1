#include "offail/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "offail/estimation.hpp"
#include "offail/gridworld.hpp"
#include "offail/oracles.hpp"
#include "offail/policy_update.hpp"

namespace offail {

namespace {

// Stream ids for the per-seed generator.
constexpr std::uint64_t kStreamEnv = 0;
constexpr std::uint64_t kStreamExpert = 1;
constexpr std::uint64_t kStreamMinibatch = 2;
constexpr std::uint64_t kStreamEval = 3;

constexpr std::size_t kShiftCheckEvery = 50;

}  // namespace

std::vector<RunRecord> run_seed(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  const EmptyRoomSpec room{config.room_side, config.horizon};
  const TabularMDP mdp = build_empty_room(room);
  const Policy expert = build_expert(room);
  const Shape shape = mdp.shape();
  const std::size_t K = config.iterations;
  const std::size_t N = config.window_n;
  const double sigma = config.resolved_sigma();
  const double eta = config.resolved_eta();
  const BonusConfig bonus{config.bonus_cb, config.delta, K};

  const Rng root(seed);
  Rng env_rng = root.split(kStreamEnv);
  Rng minibatch_rng = root.split(kStreamMinibatch);
  Rng eval_rng = root.split(kStreamEval);

  const OccupancyMeasure expert_occ = [&] {
    if (config.expert_trajectories == 0) return compute_occupancy(mdp, expert);
    Rng expert_rng = root.split(kStreamExpert);
    const auto demos = sample_trajectories(mdp, expert, config.expert_trajectories, expert_rng);
    return empirical_occupancy(shape, demos);
  }();

  TrajectoryBuffer buffer =
      config.buffer_capacity > 0
          ? TrajectoryBuffer::with_capacity(shape, N, config.batch_b, config.buffer_capacity)
          : TrajectoryBuffer::policy_window(shape, N, config.batch_b);
  TransitionCounts counts(shape);
  RegretLedger ledger(mdp, expert);
  std::deque<OccupancyMeasure> recent_exact;  // exact_gradient mode only

  Policy policy = Policy::uniform(shape);
  RewardParams mu = RewardParams::constant(shape, 0.5);

  std::vector<RunRecord> records;
  double worst_tv = 0.0;
  const double tv_bound = tv_step_bound(shape.actions, shape.horizon, sigma);

  for (std::size_t k = 1; k <= K; ++k) {
    // Collect B episodes with pi^{k-1}.
    auto trajs = sample_trajectories(mdp, policy, config.batch_b, env_rng, k - 1);
    counts.add(trajs);
    buffer.push(k - 1, std::move(trajs));

    // Reward step on the window mixture.
    OccupancyMeasure agent_occ = [&] {
      if (config.exact_gradient) {
        recent_exact.push_back(compute_occupancy(mdp, policy));
        if (recent_exact.size() > N) recent_exact.pop_front();
        const std::vector<OccupancyMeasure> comps(recent_exact.begin(), recent_exact.end());
        const std::vector<double> w(comps.size(), 1.0 / static_cast<double>(comps.size()));
        return mix_occupancies(comps, w);
      }
      if (buffer.capacity_mode()) return minibatch_occupancy(buffer, config.minibatch, minibatch_rng);
      return empirical_mixture_occupancy(buffer);
    }();
    mu = projected_ascent_step(mu, reward_gradient(expert_occ, agent_occ), eta);

    // Policy step.
    const OptimisticQ q = optimistic_q_recursion(counts, policy, mu, bonus,
                                                 config.known_transitions ? &mdp : nullptr);
    Policy next = mirror_descent_step(policy, q.q, sigma);

    const PolicyStepReport step = check_policy_step(policy, next, sigma, shape.actions,
                                                    shape.horizon);
    worst_tv = std::max(worst_tv, step.max_tv);
    if (config.test_mode) {
      if (!step.pass) {
        throw InvariantViolation("iteration " + std::to_string(k) + ": policy step TV " +
                                 format_double(step.max_tv) + " exceeds A*H*sigma = " +
                                 format_double(step.bound));
      }
      if (k % kShiftCheckEvery == 0) {
        const auto shift = check_occupancy_shift(mdp, policy, next);
        if (!shift.pass) {
          throw InvariantViolation("iteration " + std::to_string(k) +
                                   ": occupancy shift exceeds the policy-TV bound");
        }
      }
    }
    policy = std::move(next);

    const RegretRecord& reg = ledger.record(policy, mu);
    if (k % config.eval_every == 0 || k == K) {
      RunRecord rec;
      rec.seed = seed;
      rec.iter = k;
      rec.interactions = k * config.batch_b * shape.horizon;
      rec.exact_j = reg.agent_true_return;
      if (config.mc_eval) {
        const auto episodes = sample_trajectories(mdp, policy, config.eval_episodes, eval_rng, k);
        double total = 0.0;
        for (const auto& ep : episodes) total += trajectory_return(ep, mdp.true_reward());
        rec.eval_return = total / static_cast<double>(episodes.size());
      } else {
        rec.eval_return = rec.exact_j;
      }
      rec.exact_l = reg.loss;
      rec.tv_slack = tv_bound - worst_tv;
      rec.policy_regret = reg.policy_regret;
      rec.reward_regret = reg.reward_regret;
      rec.ail_regret = reg.ail_regret;
      records.push_back(rec);
      worst_tv = 0.0;
    }
  }
  return records;
}

std::vector<RunRecord> run_experiment(const RunConfig& config) {
  config.validate();
  std::vector<RunRecord> all;
  for (std::uint64_t seed : config.seeds) {
    auto recs = run_seed(config, seed);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

std::optional<RunRecord> first_reaching(const std::vector<RunRecord>& records, double threshold) {
  for (const RunRecord& r : records) {
    if (r.eval_return >= threshold) return r;
  }
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.seed << ',' << r.iter << ',' << r.interactions << ',' << format_double(r.eval_return)
        << ',' << format_double(r.exact_j) << ',' << format_double(r.exact_l) << ','
        << format_double(r.tv_slack) << ',' << format_double(r.policy_regret) << ','
        << format_double(r.reward_regret) << ',' << format_double(r.ail_regret) << '\n';
  }
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_csv_file(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  write_text_file(path, to_csv(records));
}

std::vector<AggregatePoint> aggregate(const std::vector<std::vector<RunRecord>>& per_seed) {
  std::vector<AggregatePoint> points;
  if (per_seed.empty()) return points;
  const std::size_t rows = per_seed.front().size();
  for (const auto& recs : per_seed) {
    if (recs.size() != rows) throw ContractViolation("aggregate: seeds have different schedules");
  }
  auto mean_std = [&](std::size_t i, auto field) {
    double sum = 0.0;
    for (const auto& recs : per_seed) sum += field(recs[i]);
    const double n = static_cast<double>(per_seed.size());
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& recs : per_seed) var += (field(recs[i]) - mean) * (field(recs[i]) - mean);
    return std::make_pair(mean, std::sqrt(var / n));
  };
  for (std::size_t i = 0; i < rows; ++i) {
    AggregatePoint p;
    p.iter = per_seed.front()[i].iter;
    p.interactions = per_seed.front()[i].interactions;
    for (const auto& recs : per_seed) {
      if (recs[i].iter != p.iter) throw ContractViolation("aggregate: misaligned iterations");
    }
    p.seeds = per_seed.size();
    std::tie(p.eval_return_mean, p.eval_return_std) =
        mean_std(i, [](const RunRecord& r) { return r.eval_return; });
    std::tie(p.exact_j_mean, p.exact_j_std) =
        mean_std(i, [](const RunRecord& r) { return r.exact_j; });
    std::tie(p.ail_regret_mean, p.ail_regret_std) =
        mean_std(i, [](const RunRecord& r) { return r.ail_regret; });
    points.push_back(p);
  }
  return points;
}

std::string to_aggregate_csv(std::size_t window_n, const std::vector<AggregatePoint>& points) {
  std::ostringstream out;
  out << kAggregateHeader << '\n';
  for (const AggregatePoint& p : points) {
    out << window_n << ',' << p.iter << ',' << p.interactions << ',' << p.seeds << ','
        << format_double(p.eval_return_mean) << ',' << format_double(p.eval_return_std) << ','
        << format_double(p.exact_j_mean) << ',' << format_double(p.exact_j_std) << ','
        << format_double(p.ail_regret_mean) << ',' << format_double(p.ail_regret_std) << '\n';
  }
  return out.str();
}

bool SweepResult::ok() const {
  return std::none_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.error; });
}

SweepResult sweep(const RunConfig& config, const std::vector<std::size_t>& windows,
                  std::size_t threads) {
  if (windows.empty()) throw InvalidConfig("sweep needs at least one window N");
  std::vector<RunConfig> configs;
  for (std::size_t n : windows) {
    RunConfig c = config;
    c.window_n = n;
    c.validate();
    configs.push_back(std::move(c));
  }
  const std::filesystem::path out_dir(config.out_dir);

  SweepResult result;
  for (const RunConfig& c : configs) {
    for (std::uint64_t seed : c.seeds) {
      SweepCell cell;
      cell.window_n = c.window_n;
      cell.seed = seed;
      cell.csv_path = out_dir / ("run_n" + std::to_string(c.window_n) + "_seed" +
                                 std::to_string(seed) + ".csv");
      result.cells.push_back(std::move(cell));
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, result.cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      SweepCell& cell = result.cells[i];
      const std::size_t which = i / config.seeds.size();
      try {
        cell.records = run_seed(configs[which], cell.seed);
        write_csv_file(cell.csv_path, cell.records);
      } catch (const IoError& e) {
        cell.error = e.what();
        cell.error_code = 3;
      } catch (const InvariantViolation& e) {
        cell.error = e.what();
        cell.error_code = 2;
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.error_code = 1;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t w = 0; w < configs.size(); ++w) {
    std::vector<std::vector<RunRecord>> per_seed;
    for (std::size_t j = 0; j < config.seeds.size(); ++j) {
      const SweepCell& cell = result.cells[w * config.seeds.size() + j];
      if (!cell.error) per_seed.push_back(cell.records);
    }
    if (per_seed.empty()) continue;
    const auto path = out_dir / ("aggregate_n" + std::to_string(configs[w].window_n) + ".csv");
    write_text_file(path, to_aggregate_csv(configs[w].window_n, aggregate(per_seed)));
    result.aggregate_paths.push_back(path);
  }
  return result;
}

}  // namespace offail
