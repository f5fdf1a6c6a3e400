#pragma once

#include <array>
#include <cmath>

namespace philab {

// Points and gradients are stored with two slots; in 1D the second is 0.
using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

}  // namespace philab
