#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecoflight/errors.hpp"
#include "ecoflight/format.hpp"
#include "ecoflight/geometry.hpp"

namespace ecoflight {

/*
 * Physical parameters of the drone plus model switches.
 *
 * The numeric defaults are implementation choices (a 1.5 kg quadrotor at sea
 * level); no published values exist for them.
 */
struct DroneParams {
  double mass = 1.5;              // m, kg
  double gravity = 9.81;          // g, m/s^2
  double air_density = 1.225;     // rho, kg/m^3
  double drag_coefficient = 1.0;  // cd
  double area = 0.1;              // A, m^2
  double cruise_speed = 3.0;      // v_c, m/s
  // Negative kinetic-energy changes cost nothing instead of being credited.
  bool clamp_regen = true;
  // Charge one 0 -> v_c acceleration per path.
  bool include_initial_accel = false;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(mass)) throw ValidationError("m must be > 0");
    if (!positive(gravity)) throw ValidationError("g must be > 0");
    if (!positive(air_density)) throw ValidationError("rho must be > 0");
    if (!positive(area)) throw ValidationError("area must be > 0");
    if (!positive(cruise_speed)) throw ValidationError("v_c must be > 0");
    if (!std::isfinite(drag_coefficient) || drag_coefficient < 0.0) throw ValidationError("cd must be >= 0");
  }

  friend bool operator==(const DroneParams&, const DroneParams&) = default;
};

// One straight piece of flight between two positions.
struct Segment {
  Vec3 p_old;
  Vec3 p_new;
  Vec3 v_old;
  Vec3 v_new;

  Vec3 displacement() const { return p_new - p_old; }
};

// Segment between two points flown at cruise speed along its own direction.
inline Segment cruise_segment(const DroneParams& p, const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double len = d.norm();
  const Vec3 v = len > 0.0 ? d * (p.cruise_speed / len) : Vec3{};
  return {from, to, v, v};
}

inline Vec3 gravity_force(const DroneParams& p) { return {0.0, 0.0, -p.mass * p.gravity}; }

// m * (v_new - v_old) / dt. A stationary drone (both velocities zero) is
// hovering: its thrust is m*g straight up.
inline Vec3 thrust_force(const DroneParams& p, const Vec3& v_old, const Vec3& v_new, double dt) {
  if (!(dt > 0.0)) throw DomainError("thrust_force: dt must be > 0");
  if (v_old.is_zero() && v_new.is_zero()) return -gravity_force(p);
  return (v_new - v_old) * (p.mass / dt);
}

inline double drag_magnitude(const DroneParams& p, double speed) {
  return 0.5 * p.drag_coefficient * p.area * p.air_density * speed * speed;
}

// Opposes the velocity; zero at rest.
inline Vec3 drag_force(const DroneParams& p, const Vec3& v) {
  const double speed = v.norm();
  if (speed == 0.0) return {};
  return v * (-drag_magnitude(p, speed) / speed);
}

inline Vec3 net_force(const DroneParams& p, const Segment& s) {
  const bool hovering = s.v_old.is_zero() && s.v_new.is_zero();
  const Vec3 thrust = hovering ? -gravity_force(p)
                               : thrust_force(p, s.v_old, s.v_new, s.displacement().norm() / p.cruise_speed);
  return gravity_force(p) + drag_force(p, s.v_new) + thrust;
}

// Work of the net force over the segment. Diagnostic only: segment_energy
// does not include it.
inline double work_net(const DroneParams& p, const Segment& s) {
  const Vec3 d = s.displacement();
  if (d.is_zero()) return 0.0;
  return net_force(p, s).dot(d);
}

// m * g * d_t, taken literally: the result has units of N*s, which this
// library treats as the hover cost unit.
inline double hover_energy(const DroneParams& p, double hover_time) {
  if (!(hover_time >= 0.0)) throw DomainError("hover_energy: hover time must be >= 0");
  return p.mass * p.gravity * hover_time;
}

inline double drag_energy(const DroneParams& p, double speed, double distance) {
  if (speed < 0.0 || distance < 0.0) throw DomainError("drag_energy: speed and distance must be >= 0");
  return drag_magnitude(p, speed) * distance;
}

inline double accel_energy(const DroneParams& p, double v_old, double v_new) {
  const double e = 0.5 * p.mass * (v_new * v_new - v_old * v_old);
  return p.clamp_regen ? std::max(e, 0.0) : e;
}

// Potential-energy gain; descending is free.
inline double climb_energy(const DroneParams& p, double dz) { return p.mass * p.gravity * std::max(dz, 0.0); }

inline double segment_energy(const DroneParams& p, const Segment& s) {
  const Vec3 d = s.displacement();
  const double len = d.norm();
  if (len == 0.0) return 0.0;
  return hover_energy(p, len / p.cruise_speed) + drag_energy(p, p.cruise_speed, len) +
         accel_energy(p, s.v_old.norm(), s.v_new.norm()) + climb_energy(p, d.z);
}

// Energy per meter of level flight at cruise speed.
inline double level_cost_per_meter(const DroneParams& p) {
  return p.mass * p.gravity / p.cruise_speed + drag_magnitude(p, p.cruise_speed);
}

inline double initial_accel_energy(const DroneParams& p) {
  return p.include_initial_accel ? accel_energy(p, 0.0, p.cruise_speed) : 0.0;
}

// Sum of cruise-speed segment energies over a sequence of positions.
inline double path_energy(const DroneParams& p, std::span<const Vec3> waypoints) {
  if (waypoints.empty()) throw ValidationError("path must have at least one waypoint");
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i] == waypoints[i - 1]) throw ValidationError("consecutive waypoints must differ");
    total += segment_energy(p, cruise_segment(p, waypoints[i - 1], waypoints[i]));
  }
  return total + initial_accel_energy(p);
}

// Grid path variant; consecutive cells must be 26-adjacent.
inline double path_energy(const DroneParams& p, std::span<const Cell> waypoints) {
  if (waypoints.empty()) throw ValidationError("path must have at least one waypoint");
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (!adjacent26(waypoints[i - 1], waypoints[i]))
      throw ValidationError("waypoints " + std::to_string(i - 1) + " and " + std::to_string(i) +
                            " are not 26-adjacent");
    total += segment_energy(p, cruise_segment(p, to_meters(waypoints[i - 1]), to_meters(waypoints[i])));
  }
  return total + initial_accel_energy(p);
}

inline double path_length(std::span<const Cell> waypoints) {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += euclidean(waypoints[i - 1], waypoints[i]);
  return len;
}

// ---------------------------------------------------------------------------
// Parameter documents
//
//   { "m": 1.5, "g": 9.81, "rho": 1.225, "cd": 1.0, "area": 0.1, "v_c": 3.0,
//     "clamp_regen": true, "include_initial_accel": false }
//
// Missing fields keep their defaults.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const DroneParams& p) {
  return nlohmann::json{{"m", p.mass},
                        {"g", p.gravity},
                        {"rho", p.air_density},
                        {"cd", p.drag_coefficient},
                        {"area", p.area},
                        {"v_c", p.cruise_speed},
                        {"clamp_regen", p.clamp_regen},
                        {"include_initial_accel", p.include_initial_accel}};
}

inline DroneParams params_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("params document must be an object");
  DroneParams p;
  auto number = [&](const char* key, double& dst) {
    if (auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
      dst = it->get<double>();
    }
  };
  auto boolean = [&](const char* key, bool& dst) {
    if (auto it = doc.find(key); it != doc.end()) {
      if (!it->is_boolean()) throw ParseError(std::string("field '") + key + "' must be a boolean");
      dst = it->get<bool>();
    }
  };
  number("m", p.mass);
  number("g", p.gravity);
  number("rho", p.air_density);
  number("cd", p.drag_coefficient);
  number("area", p.area);
  number("v_c", p.cruise_speed);
  boolean("clamp_regen", p.clamp_regen);
  boolean("include_initial_accel", p.include_initial_accel);
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return p;
}

inline void save_params(const DroneParams& p, std::ostream& out) { out << to_json(p).dump(2) << '\n'; }

inline DroneParams load_params(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("params document: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return params_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }
}

}  // namespace ecoflight
