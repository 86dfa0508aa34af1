#pragma once

#include <cstddef>
#include <optional>

#include "offail/mdp.hpp"

namespace offail {

/// n-by-n empty room: start at (1,1), goal at (n,n), horizon 3n unless overridden.
///
/// Cell (i, j) has row i and column j, both 1-based, and flattens to state
/// index (i-1)*n + (j-1). "down" increases the row, "right" the column.
struct EmptyRoomSpec {
  std::size_t side = 0;
  std::optional<std::size_t> horizon;

  std::size_t resolved_horizon() const { return horizon.value_or(3 * side); }
};

enum class GridAction : std::size_t { kStay = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };
inline constexpr std::size_t kGridActions = 5;

inline constexpr double kGoalReward = 1.0;
inline constexpr double kStepReward = -0.1;

std::size_t grid_state(std::size_t side, std::size_t row, std::size_t col);

/// Deterministic successor; moves into a wall leave the state unchanged.
std::size_t grid_step(std::size_t side, std::size_t state, GridAction action);

/// Throws InvalidConfig for side < 2 or a zero horizon.
TabularMDP build_empty_room(const EmptyRoomSpec& spec);

/// Deterministic demonstrator: right until the last column, then down, then stay.
Policy build_expert(const EmptyRoomSpec& spec);

/// Return of the expert under the environment reward: 2(n-1) transit steps
/// at the step penalty, the rest at the goal.
double expert_return(const EmptyRoomSpec& spec);

}  // namespace offail
