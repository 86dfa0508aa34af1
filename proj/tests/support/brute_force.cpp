#include "support/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace offail::testing {

namespace {

// Depth-first walk over all (s_0, a_0, ..., s_{H-1}, a_{H-1}) with positive probability.
void walk_paths(const TabularMDP& mdp, const Policy& policy,
                const std::function<void(const std::vector<Step>&, double)>& visit) {
  const std::size_t H = mdp.horizon();
  std::vector<Step> path(H);
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t h, std::size_t s,
                                                                  double prob) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      const double pa = prob * policy(h, s, a);
      if (pa == 0.0) continue;
      path[h] = {h, s, a};
      if (h + 1 == H) {
        visit(path, pa);
        continue;
      }
      const auto next = mdp.transition(h, s, a);
      for (std::size_t s2 = 0; s2 < mdp.num_states(); ++s2) {
        if (next[s2] > 0.0) rec(h + 1, s2, pa * next[s2]);
      }
    }
  };
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    const double p0 = mdp.initial_dist()[s];
    if (p0 > 0.0) rec(0, s, p0);
  }
}

}  // namespace

StepTable enumerate_occupancy(const TabularMDP& mdp, const Policy& policy) {
  StepTable d(mdp.shape());
  walk_paths(mdp, policy, [&](const std::vector<Step>& path, double p) {
    for (const Step& st : path) d(st.h, st.state, st.action) += p;
  });
  return d;
}

double enumerate_value(const TabularMDP& mdp, const Policy& policy, const StepTable& reward) {
  double total = 0.0;
  walk_paths(mdp, policy, [&](const std::vector<Step>& path, double p) {
    double ret = 0.0;
    for (const Step& st : path) ret += reward(st.h, st.state, st.action);
    total += p * ret;
  });
  return total;
}

double enumerate_best_deterministic_value(const TabularMDP& mdp, const StepTable& reward) {
  const Shape& sh = mdp.shape();
  const std::size_t slots = sh.states * sh.horizon;
  std::vector<std::size_t> choice(slots, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    StepTable probs(sh);
    for (std::size_t i = 0; i < slots; ++i) probs(i / sh.states, i % sh.states, choice[i]) = 1.0;
    best = std::max(best, enumerate_value(mdp, Policy(std::move(probs)), reward));
    std::size_t i = 0;
    while (i < slots && ++choice[i] == sh.actions) choice[i++] = 0;
    if (i == slots) break;
  }
  return best;
}

double grid_search_box_max(const StepTable& coeffs, double resolution) {
  const auto all = coeffs.flat();
  const std::size_t levels = static_cast<std::size_t>(std::llround(1.0 / resolution)) + 1;
  double total = 0.0;
  for (std::size_t start = 0; start < all.size(); start += kBoxBlock) {
    const auto c = all.subspan(start, std::min(kBoxBlock, all.size() - start));
    std::vector<std::size_t> idx(c.size(), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      double v = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        v += c[i] * static_cast<double>(idx[i]) * resolution;
      }
      best = std::max(best, v);
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == levels) idx[i++] = 0;
      if (i == idx.size()) break;
    }
    total += best;
  }
  return total;
}

namespace {

double kl_objective(std::span<const double> p, std::span<const double> prev,
                    std::span<const double> q, double sigma) {
  double lin = 0.0, kl = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    lin += q[a] * p[a];
    if (p[a] > 0.0) kl += p[a] * std::log(p[a] / prev[a]);
  }
  return lin - kl / sigma;
}

// Evaluate every grid point within `radius` of `center` (free coordinates
// 0..A-2, last one implied) and keep the best feasible one.
void refine(std::vector<double>& best, double& best_val, std::span<const double> prev,
            std::span<const double> q, double sigma, double step, double radius) {
  const std::size_t free = best.size() - 1;
  const long span = std::lround(radius / step);
  const std::vector<double> center = best;
  std::vector<long> off(free, -span);
  std::vector<double> p(best.size());
  while (true) {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < free; ++i) {
      p[i] = std::round((center[i] + static_cast<double>(off[i]) * step) / step) * step;
      if (p[i] < 0.0 || p[i] > 1.0) ok = false;
      sum += p[i];
    }
    p[free] = 1.0 - sum;
    if (ok && p[free] >= -1e-12) {
      p[free] = std::max(0.0, p[free]);
      const double v = kl_objective(p, prev, q, sigma);
      if (v > best_val) {
        best_val = v;
        best = p;
      }
    }
    std::size_t i = 0;
    while (i < free && ++off[i] > span) off[i++] = -span;
    if (i == free) break;
  }
}

}  // namespace

std::vector<double> grid_search_kl_step(std::span<const double> prev, std::span<const double> q,
                                        double sigma, double final_resolution) {
  std::vector<double> best(prev.begin(), prev.end());
  double best_val = kl_objective(best, prev, q, sigma);
  // Coarse pass over the whole simplex, then shrink the window around the incumbent.
  refine(best, best_val, prev, q, sigma, 0.05, 1.0);
  double step = 0.05;
  while (step > final_resolution * 1.0001) {
    const double next = std::max(final_resolution, step / 10.0);
    refine(best, best_val, prev, q, sigma, next, step);
    step = next;
  }
  return best;
}

std::vector<Shape> small_shape_corpus() {
  // {states, actions, horizon}
  return {{1, 1, 2}, {2, 1, 3}, {2, 2, 2}, {2, 2, 3}, {3, 2, 2}, {2, 3, 2},
          {3, 2, 4}, {2, 3, 4}, {2, 2, 6}, {4, 3, 2}, {3, 4, 2}, {1, 4, 3}};
}

}  // namespace offail::testing
