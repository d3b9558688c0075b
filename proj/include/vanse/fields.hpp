#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "vanse/lattice.hpp"

namespace vanse {

/// Uniform periodic Cartesian grid with n cells per direction. Internally
/// the spacing is 1; physical spacing lives in the unit converter.
/// Linear cell index is x + n * (y + n * z).
class Grid {
 public:
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t cells() const { return cells_; }

  std::size_t index(const IntVec& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(n_) * static_cast<std::size_t>(c[2]));
  }
  IntVec coords(std::size_t idx) const;

  /// Component-wise periodic wrap of c + offset; unused axes stay at zero.
  IntVec neighbor(const IntVec& c, const IntVec& offset) const;
  std::size_t neighbor_index(std::size_t idx, const IntVec& offset) const {
    return index(neighbor(coords(idx), offset));
  }

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && n_ == other.n_; }

 private:
  int dim_;
  int n_;
  std::size_t cells_;
};

/// Free-function form of Grid::neighbor.
IntVec neighbor(const Grid& grid, const IntVec& c, const IntVec& offset);

/// Precomputed +/-1 axis neighbours of every cell, for field-wide sweeps.
class NeighborTable {
 public:
  explicit NeighborTable(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t plus(int axis, std::size_t cell) const { return plus_[axis][cell]; }
  std::size_t minus(int axis, std::size_t cell) const { return minus_[axis][cell]; }
  /// Neighbour along an axis-aligned offset (one non-zero entry of +/-1, or zero).
  std::size_t along(const IntVec& offset, std::size_t cell) const;

 private:
  Grid grid_;
  std::array<std::vector<std::size_t>, 3> plus_;
  std::array<std::vector<std::size_t>, 3> minus_;
};

class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0)
      : grid_(grid), data_(grid.cells(), value) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double at(const IntVec& c) const { return data_[grid_.index(c)]; }
  double& at(const IntVec& c) { return data_[grid_.index(c)]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

 private:
  Grid grid_;
  std::vector<double> data_;
};

/// One d-vector per cell, stored component-wise. Components beyond the grid
/// dimension exist and stay zero so kernels can treat every case as 3D.
class VectorField {
 public:
  explicit VectorField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.cells(); }

  double& operator()(int comp, std::size_t i) { return comp_[comp][i]; }
  double operator()(int comp, std::size_t i) const { return comp_[comp][i]; }
  Vec3 at(std::size_t i) const { return {comp_[0][i], comp_[1][i], comp_[2][i]}; }
  void set(std::size_t i, const Vec3& v) {
    comp_[0][i] = v[0];
    comp_[1][i] = v[1];
    comp_[2][i] = v[2];
  }

  std::span<double> component(int comp) { return comp_[comp]; }
  std::span<const double> component(int comp) const { return comp_[comp]; }

 private:
  Grid grid_;
  std::array<std::vector<double>, 3> comp_;
};

/// Double-buffered populations, structure-of-arrays: value (i, cell) lives at
/// i * cells + cell. A step reads `current`, writes `next`, then swaps.
class PopulationField {
 public:
  PopulationField(const Grid& grid, int q);

  const Grid& grid() const { return grid_; }
  int q() const { return q_; }

  double& at(int i, std::size_t cell) { return current_[static_cast<std::size_t>(i) * grid_.cells() + cell]; }
  double at(int i, std::size_t cell) const { return current_[static_cast<std::size_t>(i) * grid_.cells() + cell]; }

  std::span<double> current() { return current_; }
  std::span<const double> current() const { return current_; }
  std::span<double> next() { return next_; }

  /// Populations of one cell from the current buffer, in direction order.
  std::vector<double> cell(std::size_t cell) const;

  void swap() { current_.swap(next_); }

 private:
  Grid grid_;
  int q_;
  std::vector<double> current_;
  std::vector<double> next_;
};

namespace detail {

template <class F, std::size_t... I>
inline void static_for_impl(F&& f, std::index_sequence<I...>) {
  (f(std::integral_constant<int, static_cast<int>(I)>{}), ...);
}

/// f(std::integral_constant<int, i>) for i = 0 .. N-1, fully unrolled.
template <int N, class F>
inline void static_for(F&& f) {
  static_for_impl(f, std::make_index_sequence<static_cast<std::size_t>(N)>{});
}

/// First cells of a grid row (fixed y, z) and of its neighbouring rows along
/// +/-e_a for a >= 1. Neighbours along x are handled by for_each_x.
struct RowNeighbors {
  std::size_t base = 0;
  std::array<std::size_t, 3> plus{};
  std::array<std::size_t, 3> minus{};

  /// Index of the neighbour of x along +e_a (s = +1) or -e_a (s = -1),
  /// given the already wrapped x - 1 and x + 1.
  std::size_t along(int a, int s, std::size_t x, std::size_t xm, std::size_t xp) const {
    if (a == 0) return base + (s > 0 ? xp : xm);
    return (s > 0 ? plus[a] : minus[a]) + x;
  }
  /// Compile-time axis and sign, for loops that should vectorize.
  template <int A, int S>
  std::size_t at(std::size_t x, std::size_t xm, std::size_t xp) const {
    if constexpr (A == 0) {
      return base + (S > 0 ? xp : xm);
    } else {
      return (S > 0 ? plus[A] : minus[A]) + x;
    }
  }
};

/// Calls fn(RowNeighbors) for every row in index order.
template <class RowFn>
void for_each_row(const Grid& g, RowFn&& fn) {
  const int n = g.n();
  const int ny = g.dim() > 1 ? n : 1;
  const int nz = g.dim() > 2 ? n : 1;
  const auto un = static_cast<std::size_t>(n);
  auto wrap = [n](int v) { return static_cast<std::size_t>(v < 0 ? v + n : (v >= n ? v - n : v)); };
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      RowNeighbors r;
      r.base = un * (static_cast<std::size_t>(y) + un * static_cast<std::size_t>(z));
      if (g.dim() > 1) {
        r.plus[1] = un * (wrap(y + 1) + un * static_cast<std::size_t>(z));
        r.minus[1] = un * (wrap(y - 1) + un * static_cast<std::size_t>(z));
      }
      if (g.dim() > 2) {
        r.plus[2] = un * (static_cast<std::size_t>(y) + un * wrap(z + 1));
        r.minus[2] = un * (static_cast<std::size_t>(y) + un * wrap(z - 1));
      }
      fn(r);
    }
  }
}

/// body(x, x - 1, x + 1) with periodic wrap, the two end points peeled off so
/// the interior loop has unit-stride neighbours and can be vectorized.
template <class Body>
#if defined(__GNUC__)
__attribute__((flatten))
#endif
inline void for_each_x(std::size_t n, Body&& body) {
  body(std::size_t{0}, n - 1, std::size_t{1});
  for (std::size_t x = 1; x + 1 < n; ++x) body(x, x - 1, x + 1);
  body(n - 1, n - 2, std::size_t{0});
}

}  // namespace detail

/// Central difference of phi at c; component a is
/// (phi(c + e_a) - phi(c - e_a)) / (2 dx) for a < grid dimension, zero above.
Vec3 central_gradient(const ScalarField& phi, const IntVec& c, double dx);

/// Field-wide central_gradient with the same arithmetic.
void central_gradient(const ScalarField& phi, double dx, VectorField& out);
void central_gradient(const ScalarField& phi, double dx, const NeighborTable& nb, VectorField& out);

/// Weighted sum over the quadrature offsets, sum_i w_i * sample(-offset_i).
/// T may be double or Rational; sample(IntVec) returns a T.
template <class T, class Sample>
T quadrature_weighted_sum(const QuadratureDescriptor& q, Sample&& sample) {
  T acc = T(0);
  for (int i = 0; i < q.points; ++i) {
    const IntVec& o = q.offsets[static_cast<std::size_t>(i)];
    T w;
    if constexpr (std::is_same_v<T, Rational>) {
      w = q.exact_weight(i);
    } else {
      w = static_cast<T>(q.weight(i));
    }
    acc = acc + w * sample(IntVec{-o[0], -o[1], -o[2]});
  }
  return acc;
}

/// The same integral written as phi + w_off * laplacian_h(phi), where the
/// discrete Laplacian uses the quadrature offsets.
template <class T, class Sample>
T quadrature_laplacian_form(const QuadratureDescriptor& q, Sample&& sample) {
  const T center = sample(IntVec{0, 0, 0});
  T lap = T(0);
  for (int i = 1; i < q.points; ++i) {
    const IntVec& o = q.offsets[static_cast<std::size_t>(i)];
    lap = lap + (sample(IntVec{-o[0], -o[1], -o[2]}) - center);
  }
  T w;
  if constexpr (std::is_same_v<T, Rational>) {
    w = q.exact_off_center;
  } else {
    w = static_cast<T>(q.off_center_weight);
  }
  return center + w * lap;
}

/// Cell integral of phi by the quadrature rule (weighted-sum form).
double quadrature_integral(const ScalarField& phi, const IntVec& c, const QuadratureDescriptor& q);

/// Laplacian form of quadrature_integral; agrees to rounding.
double quadrature_integral_laplacian_form(const ScalarField& phi, const IntVec& c,
                                          const QuadratureDescriptor& q);

/// Field-wide quadrature_integral (weighted-sum form).
void quadrature_integral(const ScalarField& phi, const QuadratureDescriptor& q, ScalarField& out);
void quadrature_integral(const ScalarField& phi, const QuadratureDescriptor& q, const NeighborTable& nb,
                         ScalarField& out);

}  // namespace vanse
