#pragma once

// Deterministic evaluation point sets in a closed polydisk of radius r < 1.

#include <random>

#include "polypick/polynomial.hpp"

namespace polypick {

inline constexpr int kDefaultPointCount = 12;
inline constexpr double kDefaultPointRadius = 0.6;
inline constexpr std::uint64_t kDefaultPointSeed = 1234;

struct PointSet {
  std::vector<Point> points;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::string mode;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
  std::size_t size() const { return points.size(); }

  /// `count` points total: the origin, the structured diagonal point
  /// (0.5,...,0.5) (clipped to the radius), then seeded uniform draws of
  /// per-coordinate modulus at most `radius`.  Reproducible across platforms.
  static PointSet random(int dim, int count, double radius, std::uint64_t seed) {
    if (dim < 1 || count < 1) throw std::invalid_argument("PointSet: bad dimension or count");
    if (!(radius > 0.0) || !(radius < 1.0))
      throw std::invalid_argument("PointSet: radius must lie in (0,1)");
    PointSet ps;
    ps.radius = radius;
    ps.seed = seed;
    ps.mode = "random:" + std::to_string(count) + ":" + std::to_string(radius) + ":" +
              std::to_string(seed);
    ps.points.push_back(Point(static_cast<std::size_t>(dim), Complex(0.0, 0.0)));
    if (count >= 2)
      ps.points.push_back(
          Point(static_cast<std::size_t>(dim), Complex(std::min(0.5, radius), 0.0)));
    std::mt19937_64 eng(seed);
    auto u01 = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    while (ps.points.size() < static_cast<std::size_t>(count)) {
      Point z(static_cast<std::size_t>(dim));
      for (auto& zj : z)
        zj = std::polar(radius * std::sqrt(u01()), 6.283185307179586 * u01());
      ps.points.push_back(std::move(z));
    }
    return ps;
  }

  static PointSet explicit_points(std::vector<Point> pts) {
    if (pts.empty()) throw std::invalid_argument("PointSet: empty explicit set");
    PointSet ps;
    ps.mode = "explicit";
    double r = 0.0;
    for (const auto& z : pts) {
      if (z.size() != pts[0].size()) throw std::invalid_argument("PointSet: mixed dimensions");
      for (const auto& zj : z) r = std::max(r, std::abs(zj));
    }
    if (!(r < 1.0)) throw std::invalid_argument("PointSet: points must lie in the open polydisk");
    ps.radius = r;
    ps.points = std::move(pts);
    return ps;
  }
};

}  // namespace polypick
