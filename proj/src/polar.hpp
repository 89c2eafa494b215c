#pragma once

// Polar helpers shared by geometry validation and the ring mesher.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "robinsdp/errors.hpp"
#include "robinsdp/fem_forward.hpp"

namespace robinsdp::detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angle mapped to [0, 2 pi).
inline double wrap_angle(double t) noexcept {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline double polar_angle(const Point2& p) noexcept { return wrap_angle(std::atan2(p.y, p.x)); }

inline void check_star_shaped(std::span<const Point2> poly, const std::string& what) {
  double turned = 0.0;
  for (std::size_t s = 0; s < poly.size(); ++s) {
    const Point2& p = poly[s];
    const Point2& q = poly[(s + 1) % poly.size()];
    if (!(std::hypot(p.x, p.y) > 0.0)) throw ValidationError(what + " passes through the origin");
    const double step = wrap_angle(polar_angle(q) - polar_angle(p));
    if (!(step > 0.0 && step < std::numbers::pi)) {
      throw ValidationError(what + " must be star shaped about the origin and counter-clockwise");
    }
    turned += step;
  }
  if (std::abs(turned - kTwoPi) > 1e-9) {
    throw ValidationError(what + " must wind exactly once around the origin");
  }
}

/// Radius of a star-shaped polygon (or an exact circle) along a ray.
class RadialProfile {
 public:
  RadialProfile(std::span<const Point2> poly, std::optional<double> circle)
      : poly_(poly), circle_(circle) {}

  double radius(double theta) const {
    if (circle_) return *circle_;
    const double ux = std::cos(theta);
    const double uy = std::sin(theta);
    const double t = wrap_angle(theta);
    for (std::size_t s = 0; s < poly_.size(); ++s) {
      const Point2& p = poly_[s];
      const Point2& q = poly_[(s + 1) % poly_.size()];
      const double start = polar_angle(p);
      const double span = wrap_angle(polar_angle(q) - start);
      if (wrap_angle(t - start) <= span) {
        // r u = p + tau (q - p)  =>  r = (p x d) / (u x d)
        const double dx = q.x - p.x;
        const double dy = q.y - p.y;
        return (p.x * dy - p.y * dx) / (ux * dy - uy * dx);
      }
    }
    throw ValidationError("ray misses the boundary polygon");
  }

 private:
  std::span<const Point2> poly_;
  std::optional<double> circle_;
};

}  // namespace robinsdp::detail
