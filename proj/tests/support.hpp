#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robin/radial_oracle.hpp"
#include "robin/verification.hpp"

namespace robin::test {

inline constexpr double kPi = std::numbers::pi;

inline TriMesh annulus(int nc, int nr) { return build_annulus_mesh(1.0, 2.0, nc, nr); }

inline RobinField constant_h(const TriMesh& mesh, double v) {
  return RobinField::constant(mesh, BoundaryTag::Gamma, v);
}

// One right triangle (0,0),(1,0),(0,1); the bottom edge is GAMMA.
inline TriMesh unit_triangle() {
  return TriMesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}},
                 {{{0, 1}, BoundaryTag::Gamma}, {{1, 2}, BoundaryTag::GammaD}, {{2, 0}, BoundaryTag::GammaD}});
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace robin::test
