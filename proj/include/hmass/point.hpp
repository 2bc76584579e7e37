#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hmass {

/// A point of R^d. Ordering is lexicographic in the coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : c_(dim, 0.0) {}
  explicit Point(std::vector<double> coords) : c_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : c_(coords) {}

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  std::span<const double> coords() const { return c_; }
  const std::vector<double>& vec() const { return c_; }

  bool finite() const {
    for (double v : c_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Point&, const Point&) = default;
  friend std::partial_ordering operator<=>(const Point& a, const Point& b) {
    return a.c_ <=> b.c_;
  }

 private:
  std::vector<double> c_;
};

inline double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// a + t (b - a)
inline Point lerp(const Point& a, const Point& b, double t) {
  Point p(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
  return p;
}

}  // namespace hmass
