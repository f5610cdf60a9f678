#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ecoflight/errors.hpp"
#include "ecoflight/format.hpp"
#include "ecoflight/geometry.hpp"
#include "ecoflight/rng.hpp"

namespace ecoflight {

/*
 * Voxel world made of ground-standing columns. Column (x, y) occupies the
 * voxels z in [0, height). A flying drone must additionally keep `clearance`
 * cells above the top of any non-empty column; columns without an obstacle
 * are free all the way down to the ground.
 *
 * Immutable after construction.
 */
class GridWorld {
 public:
  // Where the world came from, if generated. Optional in saved documents.
  struct Provenance {
    std::optional<std::uint64_t> seed;
    std::optional<double> density;
    friend bool operator==(const Provenance&, const Provenance&) = default;
  };

  // heights is indexed [x * ny + y].
  GridWorld(int nx, int ny, int nz, std::vector<int> heights, int clearance = 1,
            Provenance provenance = {})
      : nx_(nx), ny_(ny), nz_(nz), clearance_(clearance), heights_(std::move(heights)),
        provenance_(provenance) {
    if (nx < 1 || ny < 1 || nz < 1) throw ValidationError("world dimensions must be >= 1");
    if (clearance < 0) throw ValidationError("clearance must be >= 0");
    if (heights_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
      throw ValidationError("heightmap size does not match nx*ny");
    for (int h : heights_)
      if (h < 0 || h > nz) throw ValidationError("column height outside [0, nz]");
  }

  static GridWorld empty(int nx, int ny, int nz, int clearance = 1) {
    return GridWorld(nx, ny, nz,
                     std::vector<int>(static_cast<std::size_t>(std::max(nx, 0)) *
                                      static_cast<std::size_t>(std::max(ny, 0))),
                     clearance);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  int clearance() const { return clearance_; }
  const Provenance& provenance() const { return provenance_; }
  std::span<const int> heights() const { return heights_; }

  int height(int x, int y) const { return heights_[column_index(x, y)]; }
  std::size_t column_index(int x, int y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(y);
  }

  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.x < nx_ && c.y >= 0 && c.y < ny_ && c.z >= 0 && c.z < nz_;
  }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) * static_cast<std::size_t>(nz_);
  }

  // Dense index, monotone in lexicographic (x, y, z) order.
  std::size_t index(const Cell& c) const {
    return column_index(c.x, c.y) * static_cast<std::size_t>(nz_) + static_cast<std::size_t>(c.z);
  }

  Cell cell_at(std::size_t i) const {
    const auto z = static_cast<int>(i % static_cast<std::size_t>(nz_));
    const auto col = i / static_cast<std::size_t>(nz_);
    return {static_cast<int>(col / static_cast<std::size_t>(ny_)),
            static_cast<int>(col % static_cast<std::size_t>(ny_)), z};
  }

  std::int64_t occupied_voxels() const {
    return std::accumulate(heights_.begin(), heights_.end(), std::int64_t{0});
  }

  double occupied_fraction() const {
    return static_cast<double>(occupied_voxels()) / static_cast<double>(cell_count());
  }

  friend bool operator==(const GridWorld&, const GridWorld&) = default;

 private:
  int nx_;
  int ny_;
  int nz_;
  int clearance_;
  std::vector<int> heights_;
  Provenance provenance_;
};

inline bool is_free(const GridWorld& world, const Cell& c) {
  if (!world.in_bounds(c)) return false;
  const int h = world.height(c.x, c.y);
  return h == 0 || c.z >= h + world.clearance();
}

struct Neighbor {
  Cell cell;
  Vec3 step;  // meters
};

// Visits the free 26-neighbors of c in fixed (dx, dy, dz) lexicographic order.
template <class Visit>
void for_each_neighbor(const GridWorld& world, const Cell& c, Visit&& visit) {
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Cell n{c.x + dx, c.y + dy, c.z + dz};
        if (is_free(world, n)) visit(n, Vec3{dx * kCellSize, dy * kCellSize, dz * kCellSize});
      }
}

inline std::vector<Neighbor> neighbors(const GridWorld& world, const Cell& c) {
  std::vector<Neighbor> out;
  out.reserve(26);
  for_each_neighbor(world, c, [&](const Cell& n, const Vec3& step) { out.push_back({n, step}); });
  return out;
}

/*
 * Integer 3D line from a to b, inclusive, with exactly 1 + max|delta| cells.
 *
 * The dominant axis advances every step. The middle axis advances on the
 * steps closest to the ideal line (round half up). The minor axis only
 * advances on steps where the middle axis does, distributed the same way.
 * That nesting makes every line a shortest 26-connected path (octile length),
 * so an obstacle-agnostic line is never beaten by a grid search.
 *
 * The line is always traced from the lexicographically smaller endpoint, so
 * raster_line(b, a) is exactly raster_line(a, b) reversed.
 */
inline std::vector<Cell> raster_line(const Cell& a, const Cell& b) {
  if (b < a) {
    auto line = raster_line(b, a);
    std::reverse(line.begin(), line.end());
    return line;
  }
  const std::array<int, 3> delta{b.x - a.x, b.y - a.y, b.z - a.z};
  std::array<int, 3> axes{0, 1, 2};
  std::stable_sort(axes.begin(), axes.end(),
                   [&](int p, int q) { return std::abs(delta[p]) > std::abs(delta[q]); });

  const std::int64_t major = std::abs(delta[axes[0]]);
  const std::int64_t middle = std::abs(delta[axes[1]]);
  const std::int64_t minor = std::abs(delta[axes[2]]);
  auto sign = [&](int axis) { return delta[axis] > 0 ? 1 : -1; };
  auto round_ratio = [](std::int64_t num, std::int64_t den) { return (2 * num + den) / (2 * den); };

  std::array<int, 3> cur{a.x, a.y, a.z};
  std::vector<Cell> line;
  line.reserve(static_cast<std::size_t>(major) + 1);
  line.push_back(a);
  std::int64_t middle_steps = 0;
  std::int64_t minor_steps = 0;
  for (std::int64_t i = 1; i <= major; ++i) {
    cur[axes[0]] += sign(axes[0]);
    if (round_ratio(middle * i, major) > middle_steps) {
      ++middle_steps;
      cur[axes[1]] += sign(axes[1]);
      if (round_ratio(minor * middle_steps, middle) > minor_steps) {
        ++minor_steps;
        cur[axes[2]] += sign(axes[2]);
      }
    }
    line.push_back({cur[0], cur[1], cur[2]});
  }
  return line;
}

inline bool line_of_sight(const GridWorld& world, const Cell& a, const Cell& b) {
  const auto line = raster_line(a, b);
  return std::all_of(line.begin(), line.end(), [&](const Cell& c) { return is_free(world, c); });
}

/*
 * Random column world at a target occupied-voxel fraction.
 *
 * Uniformly random empty columns receive a height uniform in [1, max_height]
 * until the occupied fraction first reaches `density`. If every column is
 * filled before that, generation continues by raising uniformly random
 * columns still below max_height to a height uniform in (current, max_height].
 * Each step adds at most max_height voxels, which bounds the overshoot.
 *
 * Densities above max_height / nz cannot be reached and raise GenerationError.
 */
inline GridWorld generate_world(int nx, int ny, int nz, double density, int max_height,
                                std::uint64_t seed, int clearance = 1) {
  if (nx < 1 || ny < 1 || nz < 1) throw GenerationError("world dimensions must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw GenerationError("density must lie in [0, 1]");
  if (max_height < 1 || max_height > nz) throw GenerationError("max_height must lie in [1, nz]");

  const std::size_t columns = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  const auto total = static_cast<double>(columns) * nz;
  const auto needed = static_cast<std::int64_t>(std::ceil(density * total - 1e-9));
  const auto capacity = static_cast<std::int64_t>(columns) * max_height;
  if (needed > capacity) {
    throw GenerationError("density " + format_double(density) +
                          " unreachable: columns saturate at occupied fraction " +
                          format_double(static_cast<double>(capacity) / total));
  }

  Rng rng(seed);
  std::vector<int> heights(columns, 0);
  std::int64_t occupied = 0;

  std::vector<std::size_t> open(columns);
  std::iota(open.begin(), open.end(), std::size_t{0});
  auto take = [&](std::size_t k) {
    const auto col = open[k];
    open[k] = open.back();
    open.pop_back();
    return col;
  };

  // Phase 1: fill empty columns.
  while (occupied < needed && !open.empty()) {
    const auto col = take(uniform_below(rng, open.size()));
    const auto h = static_cast<int>(uniform_between(rng, 1, max_height));
    heights[col] = h;
    occupied += h;
  }

  // Phase 2: raise columns below max_height.
  open.clear();
  for (std::size_t col = 0; col < columns; ++col)
    if (heights[col] < max_height) open.push_back(col);
  while (occupied < needed) {
    const auto k = uniform_below(rng, open.size());
    const auto col = open[k];
    const auto h = static_cast<int>(uniform_between(rng, heights[col] + 1, max_height));
    occupied += h - heights[col];
    heights[col] = h;
    if (h == max_height) take(k);
  }

  return GridWorld(nx, ny, nz, std::move(heights), clearance,
                   GridWorld::Provenance{seed, density});
}

// Two distinct free cells drawn uniformly from all free cells.
inline std::pair<Cell, Cell> sample_endpoints(const GridWorld& world, std::uint64_t seed) {
  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < world.cell_count(); ++i)
    if (is_free(world, world.cell_at(i))) free_cells.push_back(i);
  if (free_cells.size() < 2) throw SamplingError("world has fewer than 2 free cells");

  Rng rng(seed);
  const auto first = uniform_below(rng, free_cells.size());
  auto second = uniform_below(rng, free_cells.size() - 1);
  if (second >= first) ++second;
  return {world.cell_at(free_cells[first]), world.cell_at(free_cells[second])};
}

// ---------------------------------------------------------------------------
// World documents
//
//   { "nx": 2, "ny": 2, "nz": 3, "clearance": 1,
//     "heights": [[0, 1], [2, 0]],          // heights[x][y]
//     "seed": 42, "density": 0.3 }          // optional provenance
// ---------------------------------------------------------------------------

inline void save_world(const GridWorld& world, std::ostream& out) {
  out << "{\n";
  out << "  \"nx\": " << world.nx() << ",\n";
  out << "  \"ny\": " << world.ny() << ",\n";
  out << "  \"nz\": " << world.nz() << ",\n";
  out << "  \"clearance\": " << world.clearance() << ",\n";
  if (world.provenance().seed) out << "  \"seed\": " << *world.provenance().seed << ",\n";
  if (world.provenance().density)
    out << "  \"density\": " << format_double(*world.provenance().density) << ",\n";
  out << "  \"heights\": [\n";
  for (int x = 0; x < world.nx(); ++x) {
    out << "    [";
    for (int y = 0; y < world.ny(); ++y) out << (y ? ", " : "") << world.height(x, y);
    out << (x + 1 < world.nx() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(std::string("missing field '") + name + "'");
  return *it;
}

inline int require_int(const nlohmann::json& doc, const char* name) {
  const auto& v = require_field(doc, name);
  if (!v.is_number_integer()) throw ParseError(std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

}  // namespace detail

inline GridWorld world_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("world document must be an object");
  const int nx = detail::require_int(doc, "nx");
  const int ny = detail::require_int(doc, "ny");
  const int nz = detail::require_int(doc, "nz");
  const int clearance = detail::require_int(doc, "clearance");
  if (nx < 1 || ny < 1 || nz < 1) throw ParseError("nx, ny, nz must be >= 1");
  if (clearance < 0) throw ParseError("clearance must be >= 0");

  const auto& rows = detail::require_field(doc, "heights");
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(nx))
    throw ParseError("heights must be an array of nx rows");
  std::vector<int> heights;
  heights.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int x = 0; x < nx; ++x) {
    const auto& row = rows[static_cast<std::size_t>(x)];
    const std::string where = "heights[" + std::to_string(x) + "]";
    if (!row.is_array() || row.size() != static_cast<std::size_t>(ny))
      throw ParseError(where + " must be an array of ny integers");
    for (int y = 0; y < ny; ++y) {
      const auto& v = row[static_cast<std::size_t>(y)];
      const std::string at = where + "[" + std::to_string(y) + "]";
      if (!v.is_number_integer()) throw ParseError(at + " must be an integer");
      const auto h = v.get<std::int64_t>();
      if (h < 0 || h > nz) throw ParseError(at + " = " + std::to_string(h) + " outside [0, nz]");
      heights.push_back(static_cast<int>(h));
    }
  }

  GridWorld::Provenance provenance;
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) throw ParseError("field 'seed' must be an integer");
    provenance.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("density"); it != doc.end()) {
    if (!it->is_number()) throw ParseError("field 'density' must be a number");
    provenance.density = it->get<double>();
  }
  return GridWorld(nx, ny, nz, std::move(heights), clearance, provenance);
}

inline GridWorld load_world(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("world document: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return world_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(std::string("world document: ") + e.what());
  }
}

}  // namespace ecoflight
