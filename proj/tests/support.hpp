#pragma once
// Helpers shared by the kernel tests and the acceptance runner.

#include <cmath>
#include <numbers>
#include <vector>

#include "vanse/kernel.hpp"

namespace vanse_test {

using namespace vanse;

// Textbook BGK step with Guo forcing and the pressure correction force, one
// cell at a time with an array-of-structures copy of the populations. Used
// as an independent reference for the fused solver kernel.
struct ReferenceLbm {
  ReferenceLbm(const Grid& g, double tau) : grid(g), lat(make_lattice(g.dim())), tau(tau) {
    f.assign(g.cells() * static_cast<std::size_t>(lat.q), 0.0);
  }

  double& at(std::size_t cell, int i) { return f[cell * static_cast<std::size_t>(lat.q) + static_cast<std::size_t>(i)]; }

  /// With stream = false the post-collision values stay in their cell.
  void step(const ScalarField& cell_void, const VectorField& grad, const VectorField& ext, bool stream = true) {
    const int d = grid.dim();
    std::vector<double> out(f.size());
    for (std::size_t cell = 0; cell < grid.cells(); ++cell) {
      double m0 = 0.0;
      double j[3] = {0.0, 0.0, 0.0};
      for (int i = 0; i < lat.q; ++i) {
        m0 += at(cell, i);
        for (int a = 0; a < d; ++a) j[a] += lat.velocities[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * at(cell, i);
      }
      const double rho = m0 / cell_void[cell];
      double force[3] = {0.0, 0.0, 0.0};
      double u[3] = {0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) {
        force[a] = ext(a, cell) + rho * (1.0 / 3.0) * grad(a, cell);
        u[a] = (j[a] + 0.5 * force[a]) / m0;
      }
      const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
      const double uf = u[0] * force[0] + u[1] * force[1] + u[2] * force[2];
      const double omega = 1.0 / tau;
      const double pref = 1.0 - 1.0 / (2.0 * tau);
      for (int i = 0; i < lat.q; ++i) {
        const IntVec& c = lat.velocities[static_cast<std::size_t>(i)];
        const double w = lat.weights[static_cast<std::size_t>(i)];
        const double cu = c[0] * u[0] + c[1] * u[1] + c[2] * u[2];
        const double cf = c[0] * force[0] + c[1] * force[1] + c[2] * force[2];
        const double feq = w * m0 * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
        const double src = pref * w * (3.0 * (cf - uf) + 9.0 * cu * cf);
        const double post = at(cell, i) + omega * (feq - at(cell, i)) + src;
        const std::size_t target = stream ? grid.index(grid.neighbor(grid.coords(cell), c)) : cell;
        out[target * static_cast<std::size_t>(lat.q) + static_cast<std::size_t>(i)] = post;
      }
    }
    f.swap(out);
  }

  Grid grid;
  LatticeDescriptor lat;
  double tau;
  std::vector<double> f;
};

/// Lattice viscosity measured from the decay of a Taylor-Green vortex with
/// unit void fraction and no forcing on an n x n grid.
inline double taylor_green_viscosity(int n, double tau) {
  const Grid g(2, n);
  SchemeConfig cfg;
  cfg.tau = tau;
  cfg.quadrature_dims = 2;
  Solver solver(g, cfg);
  const double k = 2.0 * std::numbers::pi / n;
  const double u0 = 0.01;
  ScalarField m0(g, 1.0);
  VectorField u(g);
  VectorField mode(g);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const IntVec c = g.coords(i);
    const double x = c[0];
    const double y = c[1];
    mode.set(i, {-std::cos(k * x) * std::sin(k * y), std::sin(k * x) * std::cos(k * y), 0.0});
    // Matching pressure keeps the start-up free of acoustic waves.
    m0[i] = 1.0 - 3.0 * u0 * u0 / 4.0 * (std::cos(2 * k * x) + std::cos(2 * k * y));
    u.set(i, {u0 * mode(0, i), u0 * mode(1, i), 0.0});
  }
  fill_equilibrium(solver.populations(), m0, u);
  const ScalarField unit(g, 1.0);
  const StepInputs in{&unit, nullptr, nullptr};
  ScalarField rho(g);
  VectorField vel(g);
  auto amplitude = [&]() {
    solver.macroscopic(in, rho, vel);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
      num += vel(0, i) * mode(0, i) + vel(1, i) * mode(1, i);
      den += mode(0, i) * mode(0, i) + mode(1, i) * mode(1, i);
    }
    return num / den;
  };
  // The amplitude decays as exp(-2 nu k^2 t).
  const int t0 = 200;
  const int t1 = 1200;
  for (int s = 0; s < t0; ++s) solver.step(in);
  const double a0 = amplitude();
  for (int s = t0; s < t1; ++s) solver.step(in);
  const double a1 = amplitude();
  return std::log(a0 / a1) / (2.0 * k * k * (t1 - t0));
}

}  // namespace vanse_test
