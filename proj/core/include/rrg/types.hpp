#pragma once

#include <Eigen/Dense>
#include <array>
#include <numbers>

namespace rrg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

constexpr double kPi = std::numbers::pi;

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

// Rotation taking e1 to v (v unit).
inline Mat2 frame_from(const Vec2& v) {
  Mat2 o;
  o.col(0) = v;
  o.col(1) = perp(v);
  return o;
}

}  // namespace rrg
