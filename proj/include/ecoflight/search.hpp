#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "ecoflight/geometry.hpp"
#include "ecoflight/world.hpp"

namespace ecoflight {

// Ordering among open nodes with equal f.
enum class TieBreak {
  kDeeperFirst,   // larger g, then lexicographically smaller cell
  kHigherFirst,   // larger z, then larger g, then lexicographically smaller cell
};

struct SearchOutcome {
  bool found = false;
  std::vector<Cell> path;  // start .. goal when found
  double cost = 0.0;       // g(goal)
  std::size_t expanded = 0;
};

namespace detail {

struct OpenEntry {
  double f;
  double g;
  int z;
  std::uint32_t index;
};

}  // namespace detail

/*
 * Best-first search over the free 26-connected cells of a world.
 *
 *   edge_cost(from, to, step_m) -> double   non-negative
 *   heuristic(cell)             -> double   consistent lower bound to goal
 *   admit(cell)                 -> bool     extra restriction on top of is_free
 *
 * The node bookkeeping follows the textbook open/closed formulation: a closed
 * node is never reopened, and a neighbor's g is (re)written when it is not yet
 * open or the tentative cost improves on it. The open set is a binary heap
 * with lazy re-insertion; stale heap entries are skipped when popped.
 *
 * `expanded` counts every node taken from the open set, the goal included.
 */
template <class EdgeCost, class Heuristic, class Admit>
SearchOutcome astar(const GridWorld& world, const Cell& start, const Cell& goal, EdgeCost&& edge_cost,
                    Heuristic&& heuristic, Admit&& admit, TieBreak tie = TieBreak::kDeeperFirst) {
  enum : std::uint8_t { kNew = 0, kOpen = 1, kClosed = 2 };
  constexpr auto kNoParent = std::numeric_limits<std::uint32_t>::max();

  SearchOutcome out;
  if (!is_free(world, start) || !is_free(world, goal) || !admit(start) || !admit(goal)) return out;

  const std::size_t n = world.cell_count();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> parent(n, kNoParent);
  std::vector<std::uint8_t> state(n, kNew);

  auto lower_priority = [tie](const detail::OpenEntry& a, const detail::OpenEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (tie == TieBreak::kHigherFirst && a.z != b.z) return a.z < b.z;
    if (a.g != b.g) return a.g < b.g;
    return a.index > b.index;
  };
  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>, decltype(lower_priority)> open(
      lower_priority);

  const auto start_index = static_cast<std::uint32_t>(world.index(start));
  const auto goal_index = static_cast<std::uint32_t>(world.index(goal));
  g[start_index] = 0.0;
  state[start_index] = kOpen;
  open.push({heuristic(start), 0.0, start.z, start_index});

  while (!open.empty()) {
    const auto top = open.top();
    open.pop();
    if (state[top.index] == kClosed || top.g != g[top.index]) continue;
    ++out.expanded;

    if (top.index == goal_index) {
      out.found = true;
      out.cost = g[goal_index];
      for (auto i = goal_index; i != kNoParent; i = parent[i]) out.path.push_back(world.cell_at(i));
      std::reverse(out.path.begin(), out.path.end());
      return out;
    }

    state[top.index] = kClosed;
    const Cell current = world.cell_at(top.index);
    for_each_neighbor(world, current, [&](const Cell& next, const Vec3& step) {
      const auto i = static_cast<std::uint32_t>(world.index(next));
      if (state[i] == kClosed || !admit(next)) return;
      const double tentative = top.g + edge_cost(current, next, step);
      if (state[i] != kOpen || tentative < g[i]) {
        g[i] = tentative;
        parent[i] = top.index;
        state[i] = kOpen;
        open.push({tentative + heuristic(next), tentative, next.z, i});
      }
    });
  }
  return out;
}

}  // namespace ecoflight
