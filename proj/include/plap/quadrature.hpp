#pragma once

#include <array>

namespace plap::quad {

// Barycentric rules on the reference triangle; weights sum to 1 (multiply by
// the triangle area).
struct TrianglePoint {
  double l0, l1, l2, w;
};

// Degree 2, interior points. Used for every |u|^p mass integral so that
// energy, residual, Hessian and the duality functional share one rule.
inline constexpr std::array<TrianglePoint, 3> kTriangle3{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
}};

// Degree 5 (Radon).
namespace detail {
inline constexpr double a1 = 0.059715871789769820;
inline constexpr double b1 = 0.470142064105115090;
inline constexpr double a2 = 0.797426985353087322;
inline constexpr double b2 = 0.101286507323456339;
inline constexpr double w0 = 0.225;
inline constexpr double w1 = 0.132394152788506181;
inline constexpr double w2 = 0.125939180544827153;
}  // namespace detail

inline constexpr std::array<TrianglePoint, 7> kTriangle7{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, detail::w0},
    {detail::a1, detail::b1, detail::b1, detail::w1},
    {detail::b1, detail::a1, detail::b1, detail::w1},
    {detail::b1, detail::b1, detail::a1, detail::w1},
    {detail::a2, detail::b2, detail::b2, detail::w2},
    {detail::b2, detail::a2, detail::b2, detail::w2},
    {detail::b2, detail::b2, detail::a2, detail::w2},
}};

struct LinePoint {
  double x, w;  // on [0,1], weights sum to 1
};

inline constexpr std::array<LinePoint, 2> kGauss2{{
    {0.21132486540518711775, 0.5},
    {0.78867513459481288225, 0.5},
}};

inline constexpr std::array<LinePoint, 3> kGauss3{{
    {0.11270166537925831148, 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.88729833462074168852, 5.0 / 18.0},
}};

}  // namespace plap::quad
