#include "vanse/fields.hpp"

#include <string>

#include "vanse/errors.hpp"

namespace vanse {

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (n < 4) throw ConfigError("grid needs at least 4 cells per direction, got " + std::to_string(n));
  cells_ = 1;
  for (int a = 0; a < dim; ++a) cells_ *= static_cast<std::size_t>(n);
}

IntVec Grid::coords(std::size_t idx) const {
  const auto n = static_cast<std::size_t>(n_);
  IntVec c{0, 0, 0};
  c[0] = static_cast<int>(idx % n);
  if (dim_ > 1) c[1] = static_cast<int>((idx / n) % n);
  if (dim_ > 2) c[2] = static_cast<int>(idx / (n * n));
  return c;
}

IntVec Grid::neighbor(const IntVec& c, const IntVec& offset) const {
  IntVec r{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    int v = (c[a] + offset[a]) % n_;
    if (v < 0) v += n_;
    r[a] = v;
  }
  return r;
}

IntVec neighbor(const Grid& grid, const IntVec& c, const IntVec& offset) { return grid.neighbor(c, offset); }

NeighborTable::NeighborTable(const Grid& grid) : grid_(grid) {
  for (int a = 0; a < 3; ++a) {
    plus_[a].resize(grid.cells());
    minus_[a].resize(grid.cells());
    IntVec p{0, 0, 0};
    IntVec m{0, 0, 0};
    p[a] = 1;
    m[a] = -1;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
      const IntVec c = grid.coords(i);
      plus_[a][i] = grid.index(grid.neighbor(c, p));
      minus_[a][i] = grid.index(grid.neighbor(c, m));
    }
  }
}

std::size_t NeighborTable::along(const IntVec& offset, std::size_t cell) const {
  for (int a = 0; a < 3; ++a) {
    if (offset[a] == 1) return plus_[a][cell];
    if (offset[a] == -1) return minus_[a][cell];
  }
  return cell;
}

VectorField::VectorField(const Grid& grid) : grid_(grid) {
  for (auto& c : comp_) c.assign(grid.cells(), 0.0);
}

PopulationField::PopulationField(const Grid& grid, int q)
    : grid_(grid),
      q_(q),
      current_(static_cast<std::size_t>(q) * grid.cells(), 0.0),
      next_(static_cast<std::size_t>(q) * grid.cells(), 0.0) {}

std::vector<double> PopulationField::cell(std::size_t cell) const {
  std::vector<double> f(static_cast<std::size_t>(q_));
  for (int i = 0; i < q_; ++i) f[static_cast<std::size_t>(i)] = at(i, cell);
  return f;
}

namespace {

double gradient_component(const ScalarField& phi, const IntVec& c, int a, double dx) {
  IntVec plus{0, 0, 0};
  IntVec minus{0, 0, 0};
  plus[a] = 1;
  minus[a] = -1;
  const Grid& g = phi.grid();
  return (phi.at(g.neighbor(c, plus)) - phi.at(g.neighbor(c, minus))) / (2.0 * dx);
}

}  // namespace

Vec3 central_gradient(const ScalarField& phi, const IntVec& c, double dx) {
  Vec3 g{0.0, 0.0, 0.0};
  for (int a = 0; a < phi.grid().dim(); ++a) g[a] = gradient_component(phi, c, a, dx);
  return g;
}

void central_gradient(const ScalarField& phi, double dx, VectorField& out) {
  central_gradient(phi, dx, NeighborTable(phi.grid()), out);
}

void central_gradient(const ScalarField& phi, double dx, const NeighborTable& nb, VectorField& out) {
  if (!(out.grid() == phi.grid()) || !(nb.grid() == phi.grid())) {
    throw UsageError("central_gradient: grid mismatch");
  }
  const Grid& g = phi.grid();
  const double two_dx = 2.0 * dx;
  const double* f = phi.span().data();
  const auto n = static_cast<std::size_t>(g.n());
  detail::static_for<3>([&](auto a) {
    if (a >= g.dim()) return;
    double* o = out.component(a).data();
    detail::for_each_row(g, [&](const detail::RowNeighbors& r) {
      detail::for_each_x(n, [&](std::size_t x, std::size_t xm, std::size_t xp) {
        o[r.base + x] = (f[r.at<a, 1>(x, xm, xp)] - f[r.at<a, -1>(x, xm, xp)]) / two_dx;
      });
    });
  });
}

namespace {

void check_quadrature(const ScalarField& phi, const QuadratureDescriptor& q) {
  if (q.dim > phi.grid().dim()) {
    throw UsageError("quadrature dimension " + std::to_string(q.dim) + " exceeds grid dimension " +
                     std::to_string(phi.grid().dim()));
  }
}

}  // namespace

double quadrature_integral(const ScalarField& phi, const IntVec& c, const QuadratureDescriptor& q) {
  check_quadrature(phi, q);
  const Grid& g = phi.grid();
  return quadrature_weighted_sum<double>(q, [&](const IntVec& o) { return phi.at(g.neighbor(c, o)); });
}

double quadrature_integral_laplacian_form(const ScalarField& phi, const IntVec& c,
                                          const QuadratureDescriptor& q) {
  check_quadrature(phi, q);
  const Grid& g = phi.grid();
  return quadrature_laplacian_form<double>(q, [&](const IntVec& o) { return phi.at(g.neighbor(c, o)); });
}

void quadrature_integral(const ScalarField& phi, const QuadratureDescriptor& q, ScalarField& out) {
  quadrature_integral(phi, q, NeighborTable(phi.grid()), out);
}

void quadrature_integral(const ScalarField& phi, const QuadratureDescriptor& q, const NeighborTable& nb,
                         ScalarField& out) {
  check_quadrature(phi, q);
  if (!(out.grid() == phi.grid()) || !(nb.grid() == phi.grid())) {
    throw UsageError("quadrature_integral: grid mismatch");
  }
  // Same summation order as quadrature_weighted_sum: the centre, then for
  // each axis the samples at c - e_a and c + e_a.
  const Grid& g = phi.grid();
  const double w0 = q.center_weight;
  const double w = q.off_center_weight;
  const double* f = phi.span().data();
  double* o = out.span().data();
  const auto n = static_cast<std::size_t>(g.n());
  auto sweep = [&](auto axes) {
    detail::for_each_row(g, [&](const detail::RowNeighbors& r) {
      detail::for_each_x(n, [&](std::size_t x, std::size_t xm, std::size_t xp) {
        double acc = 0.0 + w0 * f[r.base + x];
        detail::static_for<axes>([&](auto a) {
          acc = acc + w * f[r.at<a, -1>(x, xm, xp)];
          acc = acc + w * f[r.at<a, 1>(x, xm, xp)];
        });
        o[r.base + x] = acc;
      });
    });
  };
  if (q.dim == 1) {
    sweep(std::integral_constant<int, 1>{});
  } else if (q.dim == 2) {
    sweep(std::integral_constant<int, 2>{});
  } else {
    sweep(std::integral_constant<int, 3>{});
  }
}

}  // namespace vanse
