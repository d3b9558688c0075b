#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vanse {

using IntVec = std::array<int, 3>;
using Vec3 = std::array<double, 3>;

/// Exact fraction. Stencil weights are carried both as Rational and as
/// double so moment identities can be checked without rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {}

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational normalized() const;
};

Rational operator+(Rational a, Rational b);
Rational operator-(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator/(Rational a, Rational b);
bool operator==(Rational a, Rational b);

/// Discrete velocity set. Directions are ordered rest, axis-aligned, then
/// diagonals; opposite directions are adjacent after the rest direction.
struct LatticeDescriptor {
  std::string name;
  int dim = 0;
  int q = 0;
  std::vector<IntVec> velocities;
  std::vector<Rational> exact_weights;
  std::vector<double> weights;
  std::vector<int> opposite;
  Rational exact_cs2{1, 3};
  double cs2 = 1.0 / 3.0;
};

/// D1Q3, D2Q9 or D3Q27 for dim = 1, 2, 3. Throws ConfigError otherwise.
LatticeDescriptor make_lattice(int dim);

/// Void-fraction quadrature over a lattice cell: the rest point plus the
/// 2d axis neighbours (D1Q3, D2Q5, D3Q7). Diagonals are never used.
struct QuadratureDescriptor {
  int dim = 0;
  int points = 0;
  std::vector<IntVec> offsets;
  Rational exact_center;
  Rational exact_off_center;
  double center_weight = 0.0;
  double off_center_weight = 0.0;

  double weight(int i) const { return i == 0 ? center_weight : off_center_weight; }
  Rational exact_weight(int i) const { return i == 0 ? exact_center : exact_off_center; }
};

/// Quadrature for a void fraction that varies along `variation_dims` axes.
/// Throws ConfigError unless variation_dims is 1, 2 or 3.
QuadratureDescriptor make_quadrature(int variation_dims);

namespace stencil {

/// Compile-time copies of the flow velocity sets, used by the hot kernels.
/// Must stay in sync with make_lattice (checked in the unit tests).
template <int D>
struct Flow;

template <>
struct Flow<1> {
  static constexpr int q = 3;
  static constexpr std::array<IntVec, 3> c{{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}}};
  static constexpr std::array<double, 3> w{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
};

template <>
struct Flow<2> {
  static constexpr int q = 9;
  static constexpr std::array<IntVec, 9> c{{{0, 0, 0},
                                            {1, 0, 0},
                                            {-1, 0, 0},
                                            {0, 1, 0},
                                            {0, -1, 0},
                                            {1, 1, 0},
                                            {-1, -1, 0},
                                            {1, -1, 0},
                                            {-1, 1, 0}}};
  static constexpr std::array<double, 9> w{4.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,
                                           1.0 / 9.0,  1.0 / 9.0,  1.0 / 36.0,
                                           1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};
};

template <>
struct Flow<3> {
  static constexpr int q = 27;
  static constexpr std::array<IntVec, 27> c{{
      {0, 0, 0},                                                           //
      {1, 0, 0},   {-1, 0, 0},  {0, 1, 0},   {0, -1, 0},  {0, 0, 1},       //
      {0, 0, -1},                                                          //
      {1, 1, 0},   {-1, -1, 0}, {1, -1, 0},  {-1, 1, 0},  {1, 0, 1},       //
      {-1, 0, -1}, {1, 0, -1},  {-1, 0, 1},  {0, 1, 1},   {0, -1, -1},     //
      {0, 1, -1},  {0, -1, 1},                                             //
      {1, 1, 1},   {-1, -1, -1}, {1, 1, -1}, {-1, -1, 1}, {1, -1, 1},      //
      {-1, 1, -1}, {-1, 1, 1},  {1, -1, -1},
  }};
  static constexpr std::array<double, 27> w{
      8.0 / 27.0,  2.0 / 27.0,  2.0 / 27.0,  2.0 / 27.0,  2.0 / 27.0,  2.0 / 27.0,  2.0 / 27.0,
      1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,
      1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 54.0,  1.0 / 216.0, 1.0 / 216.0,
      1.0 / 216.0, 1.0 / 216.0, 1.0 / 216.0, 1.0 / 216.0, 1.0 / 216.0, 1.0 / 216.0};
};

}  // namespace stencil
}  // namespace vanse
