#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ecoflight/energy.hpp"
#include "ecoflight/errors.hpp"
#include "ecoflight/format.hpp"
#include "ecoflight/geometry.hpp"
#include "ecoflight/search.hpp"
#include "ecoflight/world.hpp"

namespace ecoflight {

enum class Algorithm { kEcoFlight, kDijkstra, kDirectPath, kDirectDistanceAStar, kRiseAndTraverse };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms{Algorithm::kEcoFlight, Algorithm::kDijkstra,
                                                         Algorithm::kDirectPath, Algorithm::kDirectDistanceAStar,
                                                         Algorithm::kRiseAndTraverse};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kEcoFlight: return "ecoflight";
    case Algorithm::kDijkstra: return "dijkstra_energy";
    case Algorithm::kDirectPath: return "direct_path";
    case Algorithm::kDirectDistanceAStar: return "direct_distance_astar";
    case Algorithm::kRiseAndTraverse: return "rise_and_traverse";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  return std::nullopt;
}

enum class PlanStatus { kFound, kNoPath };

inline std::string_view to_string(PlanStatus s) { return s == PlanStatus::kFound ? "found" : "no_path"; }

inline std::optional<PlanStatus> parse_status(std::string_view s) {
  if (s == "found") return PlanStatus::kFound;
  if (s == "no_path") return PlanStatus::kNoPath;
  return std::nullopt;
}

struct PlanResult {
  Algorithm algorithm = Algorithm::kEcoFlight;
  PlanStatus status = PlanStatus::kNoPath;
  std::vector<Cell> path;     // empty when no path
  double total_energy = 0.0;  // J; 0 when no path
  std::size_t expanded = 0;
  double elapsed_s = 0.0;
  bool collision_free = false;  // every path cell is free

  bool found() const { return status == PlanStatus::kFound; }
  double path_length_m() const { return path_length(path); }
};

// Lower bound on the energy still needed from n to goal: level cruise cost
// over the straight-line distance plus the unavoidable net climb.
inline double heuristic_lb(const DroneParams& p, const Cell& n, const Cell& goal) {
  return level_cost_per_meter(p) * euclidean(n, goal) + climb_energy(p, static_cast<double>(goal.z - n.z) * kCellSize);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline void require_in_bounds(const GridWorld& world, const Cell& c, const char* which) {
  if (!world.in_bounds(c)) {
    throw PreconditionError(std::string(which) + " cell is out of bounds");
  }
}

inline void require_free(const GridWorld& world, const Cell& c, const char* which) {
  require_in_bounds(world, c, which);
  if (!is_free(world, c)) throw PreconditionError(std::string(which) + " cell is occupied");
}

// Segment energy of each unit step, indexed by (dx+1)*9 + (dy+1)*3 + (dz+1).
class StepEnergyTable {
 public:
  explicit StepEnergyTable(const DroneParams& p) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz)
          table_[slot(dx, dy, dz)] =
              segment_energy(p, cruise_segment(p, Vec3{}, Vec3{dx * kCellSize, dy * kCellSize, dz * kCellSize}));
  }

  double operator()(const Cell& from, const Cell& to) const {
    return table_[slot(to.x - from.x, to.y - from.y, to.z - from.z)];
  }

 private:
  static std::size_t slot(int dx, int dy, int dz) { return static_cast<std::size_t>((dx + 1) * 9 + (dy + 1) * 3 + (dz + 1)); }
  std::array<double, 27> table_{};
};

inline PlanResult finish(Algorithm algorithm, const DroneParams& p, const GridWorld& world,
                         std::optional<std::vector<Cell>> path, std::size_t expanded, Clock::time_point t0) {
  PlanResult r;
  r.algorithm = algorithm;
  r.expanded = expanded;
  if (path) {
    r.status = PlanStatus::kFound;
    r.path = std::move(*path);
    r.total_energy = path_energy(p, std::span<const Cell>(r.path));
    r.collision_free = std::all_of(r.path.begin(), r.path.end(), [&](const Cell& c) { return is_free(world, c); });
  }
  r.elapsed_s = seconds_since(t0);
  return r;
}

inline PlanResult energy_search(Algorithm algorithm, const GridWorld& world, const DroneParams& p, const Cell& start,
                                const Cell& goal, bool use_heuristic) {
  const auto t0 = Clock::now();
  require_free(world, start, "start");
  require_free(world, goal, "goal");
  p.validate();

  const StepEnergyTable step_energy(p);
  auto cost = [&](const Cell& from, const Cell& to, const Vec3&) { return step_energy(from, to); };
  auto h = [&](const Cell& n) { return use_heuristic ? heuristic_lb(p, n, goal) : 0.0; };
  auto outcome = astar(world, start, goal, cost, h, [](const Cell&) { return true; });
  std::optional<std::vector<Cell>> path;
  if (outcome.found) path = std::move(outcome.path);
  return finish(algorithm, p, world, std::move(path), outcome.expanded, t0);
}

// Shortest-distance search used for the baselines' local detours.
template <class Admit>
SearchOutcome distance_detour(const GridWorld& world, const Cell& from, const Cell& to, Admit&& admit, TieBreak tie) {
  auto cost = [](const Cell&, const Cell&, const Vec3& step) { return step.norm(); };
  auto h = [&](const Cell& n) { return euclidean(n, to); };
  return astar(world, from, to, cost, h, admit, tie);
}

// Walks `line` cell by cell. Whenever the next cell is blocked, a detour is
// planned from the current (free) line cell to the first free line cell
// after the blockage, and the walk resumes there.
template <class Detour>
std::optional<std::vector<Cell>> follow_with_detours(const GridWorld& world, const std::vector<Cell>& line,
                                                     Detour&& detour, std::size_t& expanded) {
  std::vector<Cell> path{line.front()};
  std::size_t i = 0;
  while (i + 1 < line.size()) {
    if (is_free(world, line[i + 1])) {
      path.push_back(line[++i]);
      continue;
    }
    std::size_t j = i + 2;
    while (j + 1 < line.size() && !is_free(world, line[j])) ++j;
    SearchOutcome out = detour(line[i], line[j]);
    expanded += out.expanded;
    if (!out.found) return std::nullopt;
    path.insert(path.end(), out.path.begin() + 1, out.path.end());
    i = j;
  }
  return path;
}

}  // namespace detail

// Energy-optimal A* over the free 26-connected grid. Edge cost is the segment
// energy of the unit step; the heuristic is heuristic_lb, which is consistent
// for that cost, so the first time the goal leaves the open set it is optimal.
inline PlanResult ecoflight(const GridWorld& world, const DroneParams& p, const Cell& start, const Cell& goal) {
  return detail::energy_search(Algorithm::kEcoFlight, world, p, start, goal, true);
}

// Same search with a zero heuristic.
inline PlanResult dijkstra_energy(const GridWorld& world, const DroneParams& p, const Cell& start, const Cell& goal) {
  return detail::energy_search(Algorithm::kDijkstra, world, p, start, goal, false);
}

// Straight raster line, obstacles ignored. Always found; collision_free
// reports whether the line happened to avoid every obstacle.
inline PlanResult direct_path(const GridWorld& world, const DroneParams& p, const Cell& start, const Cell& goal) {
  const auto t0 = detail::Clock::now();
  detail::require_in_bounds(world, start, "start");
  detail::require_in_bounds(world, goal, "goal");
  p.validate();
  return detail::finish(Algorithm::kDirectPath, p, world, raster_line(start, goal), 0, t0);
}

// Follows the straight line and patches each blockage with a shortest-distance
// detour back onto the line.
inline PlanResult direct_distance_astar(const GridWorld& world, const DroneParams& p, const Cell& start,
                                        const Cell& goal) {
  const auto t0 = detail::Clock::now();
  detail::require_free(world, start, "start");
  detail::require_free(world, goal, "goal");
  p.validate();

  std::size_t expanded = 0;
  auto detour = [&](const Cell& from, const Cell& to) {
    return detail::distance_detour(world, from, to, [](const Cell&) { return true; }, TieBreak::kDeeperFirst);
  };
  auto path = detail::follow_with_detours(world, raster_line(start, goal), detour, expanded);
  return detail::finish(Algorithm::kDirectDistanceAStar, p, world, std::move(path), expanded, t0);
}

// Vertical move to the goal altitude, then a level line to the goal. Blockages
// are detoured at or above the goal altitude, preferring higher cells on ties.
inline PlanResult rise_and_traverse(const GridWorld& world, const DroneParams& p, const Cell& start,
                                    const Cell& goal) {
  const auto t0 = detail::Clock::now();
  detail::require_free(world, start, "start");
  detail::require_free(world, goal, "goal");
  p.validate();

  std::vector<Cell> route;
  const int dz = goal.z >= start.z ? 1 : -1;
  for (int z = start.z;; z += dz) {
    route.push_back({start.x, start.y, z});
    if (z == goal.z) break;
  }
  const auto level = raster_line(route.back(), goal);
  route.insert(route.end(), level.begin() + 1, level.end());

  std::size_t expanded = 0;
  auto detour = [&](const Cell& from, const Cell& to) {
    return detail::distance_detour(
        world, from, to, [&](const Cell& c) { return c.z >= goal.z; }, TieBreak::kHigherFirst);
  };
  auto path = detail::follow_with_detours(world, route, detour, expanded);
  return detail::finish(Algorithm::kRiseAndTraverse, p, world, std::move(path), expanded, t0);
}

inline PlanResult plan(Algorithm algorithm, const GridWorld& world, const DroneParams& p, const Cell& start,
                       const Cell& goal) {
  switch (algorithm) {
    case Algorithm::kEcoFlight: return ecoflight(world, p, start, goal);
    case Algorithm::kDijkstra: return dijkstra_energy(world, p, start, goal);
    case Algorithm::kDirectPath: return direct_path(world, p, start, goal);
    case Algorithm::kDirectDistanceAStar: return direct_distance_astar(world, p, start, goal);
    case Algorithm::kRiseAndTraverse: return rise_and_traverse(world, p, start, goal);
  }
  throw ValidationError("unknown algorithm");
}

// ---------------------------------------------------------------------------
// Plan result documents
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const PlanResult& r) {
  auto waypoints = nlohmann::json::array();
  for (const auto& c : r.path) waypoints.push_back({c.x, c.y, c.z});
  return nlohmann::json{{"algorithm", to_string(r.algorithm)},
                        {"status", to_string(r.status)},
                        {"waypoints", std::move(waypoints)},
                        {"total_energy_j", r.total_energy},
                        {"expanded", r.expanded},
                        {"elapsed_s", r.elapsed_s},
                        {"collision_free", r.collision_free}};
}

inline PlanResult plan_result_from_json(const nlohmann::json& doc) {
  try {
    PlanResult r;
    auto algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    auto status = parse_status(doc.at("status").get<std::string>());
    if (!algorithm) throw ParseError("unknown algorithm");
    if (!status) throw ParseError("unknown status");
    r.algorithm = *algorithm;
    r.status = *status;
    for (const auto& w : doc.at("waypoints")) {
      const auto xyz = w.get<std::array<int, 3>>();
      r.path.push_back({xyz[0], xyz[1], xyz[2]});
    }
    r.total_energy = doc.at("total_energy_j").get<double>();
    r.expanded = doc.at("expanded").get<std::size_t>();
    r.elapsed_s = doc.at("elapsed_s").get<double>();
    r.collision_free = doc.at("collision_free").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan result document: ") + e.what());
  }
}

inline void save_plan_result(const PlanResult& r, std::ostream& out) { out << to_json(r).dump(2) << '\n'; }

}  // namespace ecoflight
