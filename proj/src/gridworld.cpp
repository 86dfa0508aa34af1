#include "offail/gridworld.hpp"

#include <string>
#include <vector>

namespace offail {

namespace {

void validate(const EmptyRoomSpec& spec) {
  if (spec.side < 2) {
    throw InvalidConfig("empty room side must be >= 2, got " + std::to_string(spec.side));
  }
  if (spec.resolved_horizon() == 0) throw InvalidConfig("empty room horizon must be >= 1");
}

}  // namespace

std::size_t grid_state(std::size_t side, std::size_t row, std::size_t col) {
  if (row < 1 || row > side || col < 1 || col > side) {
    throw ContractViolation("grid_state: cell outside the room");
  }
  return (row - 1) * side + (col - 1);
}

std::size_t grid_step(std::size_t side, std::size_t state, GridAction action) {
  std::size_t row = state / side + 1;
  std::size_t col = state % side + 1;
  switch (action) {
    case GridAction::kStay:
      break;
    case GridAction::kUp:
      if (row > 1) --row;
      break;
    case GridAction::kDown:
      if (row < side) ++row;
      break;
    case GridAction::kLeft:
      if (col > 1) --col;
      break;
    case GridAction::kRight:
      if (col < side) ++col;
      break;
  }
  return grid_state(side, row, col);
}

TabularMDP build_empty_room(const EmptyRoomSpec& spec) {
  validate(spec);
  const std::size_t n = spec.side;
  const Shape shape{n * n, kGridActions, spec.resolved_horizon()};
  const std::size_t goal = grid_state(n, n, n);

  std::vector<double> transitions(shape.cells() * shape.states, 0.0);
  StepTable reward(shape);
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    for (std::size_t s = 0; s < shape.states; ++s) {
      for (std::size_t a = 0; a < shape.actions; ++a) {
        const std::size_t next = grid_step(n, s, static_cast<GridAction>(a));
        transitions[((h * shape.states + s) * shape.actions + a) * shape.states + next] = 1.0;
        reward(h, s, a) = s == goal ? kGoalReward : kStepReward;
      }
    }
  }
  std::vector<double> initial(shape.states, 0.0);
  initial[grid_state(n, 1, 1)] = 1.0;
  return TabularMDP(shape, std::move(transitions), std::move(initial), std::move(reward));
}

Policy build_expert(const EmptyRoomSpec& spec) {
  validate(spec);
  const std::size_t n = spec.side;
  const Shape shape{n * n, kGridActions, spec.resolved_horizon()};
  StepTable probs(shape);
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    for (std::size_t s = 0; s < shape.states; ++s) {
      const std::size_t row = s / n + 1;
      const std::size_t col = s % n + 1;
      GridAction a = GridAction::kStay;
      if (col < n) {
        a = GridAction::kRight;
      } else if (row < n) {
        a = GridAction::kDown;
      }
      probs(h, s, static_cast<std::size_t>(a)) = 1.0;
    }
  }
  return Policy(std::move(probs));
}

double expert_return(const EmptyRoomSpec& spec) {
  validate(spec);
  const std::size_t transit = 2 * (spec.side - 1);
  const std::size_t horizon = spec.resolved_horizon();
  if (transit >= horizon) return static_cast<double>(horizon) * kStepReward;
  return static_cast<double>(transit) * kStepReward +
         static_cast<double>(horizon - transit) * kGoalReward;
}

}  // namespace offail
