#pragma once

#include <cmath>
#include <compare>
#include <ostream>

namespace ecoflight {

// Grid spacing in meters.
inline constexpr double kCellSize = 1.0;

// Integer voxel coordinate.
struct Cell {
  int x = 0;
  int y = 0;
  int z = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Cell& c) {
  return os << '(' << c.x << ',' << c.y << ',' << c.z << ')';
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }
};

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ',' << v.y << ',' << v.z << ')';
}

constexpr Vec3 to_meters(const Cell& c) {
  return {c.x * kCellSize, c.y * kCellSize, c.z * kCellSize};
}

// Displacement from a to b in meters.
constexpr Vec3 displacement(const Cell& a, const Cell& b) {
  return to_meters(b) - to_meters(a);
}

inline double euclidean(const Cell& a, const Cell& b) { return displacement(a, b).norm(); }

// True when a and b differ by at most one cell along every axis and are distinct.
constexpr bool adjacent26(const Cell& a, const Cell& b) {
  auto d = [](int p, int q) { return p > q ? p - q : q - p; };
  return a != b && d(a.x, b.x) <= 1 && d(a.y, b.y) <= 1 && d(a.z, b.z) <= 1;
}

}  // namespace ecoflight
