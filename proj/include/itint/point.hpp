#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace itint {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDimension = 4;

// Coordinates of a point (or a tangent vector) in a chart domain of R^n,
// n <= kMaxDimension. Stored inline so evaluation loops never allocate.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : dim_(check(dim)) {}
  Point(std::initializer_list<double> xs) : dim_(check(xs.size())) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }
  explicit Point(std::span<const double> xs) : dim_(check(xs.size())) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }

  std::size_t size() const noexcept { return dim_; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }
  std::span<double> coords() noexcept { return {c_.data(), dim_}; }

  Point& operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }
  friend Point operator-(Point a) noexcept { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  double norm() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return std::sqrt(s);
  }
  double max_abs() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) m = std::max(m, std::abs(c_[i]));
    return m;
  }
  bool finite() const noexcept {
    for (std::size_t i = 0; i < dim_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

 private:
  static std::size_t check(std::size_t dim) {
    if (dim > kMaxDimension) throw std::length_error("point dimension exceeds kMaxDimension");
    return dim;
  }

  std::array<double, kMaxDimension> c_{};
  std::size_t dim_ = 0;
};

inline double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

}  // namespace itint
