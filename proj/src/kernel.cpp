#include "vanse/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "vanse/errors.hpp"

namespace vanse {

std::string to_string(SchemeVariant v) { return v == SchemeVariant::consistent ? "consistent" : "legacy"; }

SchemeVariant parse_scheme_variant(std::string_view text) {
  if (text == "consistent") return SchemeVariant::consistent;
  if (text == "legacy") return SchemeVariant::legacy;
  throw UsageError("unknown scheme variant '" + std::string(text) + "' (expected consistent|legacy)");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(tau > 0.5 * dt)) throw ConfigError("relaxation time must exceed dt/2, got tau = " + std::to_string(tau));
  if (quadrature_dims < 1 || quadrature_dims > 3) {
    throw ConfigError("quadrature variation dimension count must be 1, 2 or 3");
  }
}

namespace {

double dot(const IntVec& c, const Vec3& v) { return c[0] * v[0] + c[1] * v[1] + c[2] * v[2]; }

}  // namespace

double equilibrium(int i, double m0, const Vec3& u, const LatticeDescriptor& lat) {
  const auto k = static_cast<std::size_t>(i);
  const double cu = dot(lat.velocities[k], u);
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  return detail::equilibrium_value(lat.weights[k], m0, cu, usq);
}

double guo_forcing_term(int i, const Vec3& u, const Vec3& force, const SchemeConfig& cfg,
                        const LatticeDescriptor& lat) {
  const auto k = static_cast<std::size_t>(i);
  const IntVec& c = lat.velocities[k];
  const double prefactor = 1.0 - cfg.dt / (2.0 * cfg.tau);
  const double uf = u[0] * force[0] + u[1] * force[1] + u[2] * force[2];
  return detail::forcing_value(prefactor, lat.weights[k], dot(c, u), dot(c, force), uf);
}

Vec3 pressure_correction_force(double density, const Vec3& grad_phi) {
  return {detail::pressure_correction_component(density, grad_phi[0]),
          detail::pressure_correction_component(density, grad_phi[1]),
          detail::pressure_correction_component(density, grad_phi[2])};
}

CellMacro macro_from_populations(std::span<const double> f, double cell_void, const Vec3& force,
                                 const SchemeConfig& cfg, const LatticeDescriptor& lat, long step,
                                 std::size_t cell) {
  if (f.size() != static_cast<std::size_t>(lat.q)) throw UsageError("population count does not match lattice");
  double m0 = 0.0;
  Vec3 j{0.0, 0.0, 0.0};
  for (int i = 0; i < lat.q; ++i) {
    const auto k = static_cast<std::size_t>(i);
    m0 += f[k];
    for (int a = 0; a < lat.dim; ++a) j[a] += lat.velocities[k][a] * f[k];
  }
  if (!(m0 > 0.0) || !std::isfinite(m0)) throw NumericalBreakdown("non-positive zeroth moment", step, cell);
  if (!(cell_void > 0.0) || !std::isfinite(cell_void)) {
    throw NumericalBreakdown("non-positive cell void integral", step, cell);
  }
  CellMacro out;
  out.zeroth = m0;
  out.density = m0 / cell_void;
  for (int a = 0; a < lat.dim; ++a) out.velocity[a] = detail::velocity_component(j[a], force[a], m0, cfg.dt);
  return out;
}

double cell_void_integral(const ScalarField& phi, const IntVec& c, const SchemeConfig& cfg) {
  if (cfg.variant == SchemeVariant::legacy) return phi.at(c);
  return quadrature_integral(phi, c, make_quadrature(cfg.quadrature_dims));
}

void cell_void_integral(const ScalarField& phi, const SchemeConfig& cfg, const NeighborTable& nb,
                        ScalarField& out) {
  if (cfg.variant == SchemeVariant::legacy) {
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i];
    return;
  }
  quadrature_integral(phi, make_quadrature(cfg.quadrature_dims), nb, out);
}

Moments equilibrium_moments(double m0, const Vec3& u, const LatticeDescriptor& lat) {
  Moments m;
  const int d = lat.dim;
  m.m0 = m0;
  for (int a = 0; a < d; ++a) m.m1[a] = m0 * u[a];
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) m.m2[a][b] = m0 * u[a] * u[b] + (a == b ? m0 * lat.cs2 : 0.0);
  }
  for (int a = 0; a < d; ++a) m.m3[a][a][a] = m0 * u[a];
  return m;
}

Tensor3 full_equilibrium_third_moment(double m0, const Vec3& u, const LatticeDescriptor& lat) {
  Tensor3 t{};
  const int d = lat.dim;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        const double s = (b == c ? u[a] : 0.0) + (a == c ? u[b] : 0.0) + (a == b ? u[c] : 0.0);
        t[a][b][c] = m0 * lat.cs2 * s;
      }
    }
  }
  return t;
}

Moments population_moments(std::span<const double> values, const LatticeDescriptor& lat) {
  if (values.size() != static_cast<std::size_t>(lat.q)) throw UsageError("value count does not match lattice");
  Moments m;
  for (int i = 0; i < lat.q; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const IntVec& c = lat.velocities[k];
    const double v = values[k];
    m.m0 += v;
    for (int a = 0; a < 3; ++a) {
      m.m1[a] += c[a] * v;
      for (int b = 0; b < 3; ++b) {
        m.m2[a][b] += c[a] * c[b] * v;
        for (int g = 0; g < 3; ++g) m.m3[a][b][g] += c[a] * c[b] * c[g] * v;
      }
    }
  }
  return m;
}

namespace {

// Summing w_i m0 rarely returns m0 exactly, so a resting equilibrium would drift
// by an ulp in the first collision. Re-projecting until the kernel's summation
// order reproduces the moment makes it a bitwise fixed point. If the projection
// does not settle, the plain equilibrium is kept.
void settle_resting_cell(PopulationField& f, std::size_t cell, double m0, const LatticeDescriptor& lat) {
  double m = m0;
  for (int pass = 0; pass < 16; ++pass) {
    double sum = 0.0;
    for (int i = 0; i < lat.q; ++i) sum += equilibrium(i, m, Vec3{0, 0, 0}, lat);
    if (sum == m) {
      for (int i = 0; i < lat.q; ++i) f.at(i, cell) = equilibrium(i, m, Vec3{0, 0, 0}, lat);
      return;
    }
    m = sum;
  }
}

}  // namespace

void fill_equilibrium(PopulationField& f, const ScalarField& zeroth, const VectorField& velocity) {
  const Grid& g = f.grid();
  const LatticeDescriptor lat = make_lattice(g.dim());
  for (std::size_t cell = 0; cell < g.cells(); ++cell) {
    const Vec3 u = velocity.at(cell);
    for (int i = 0; i < lat.q; ++i) f.at(i, cell) = equilibrium(i, zeroth[cell], u, lat);
    if (u[0] == 0.0 && u[1] == 0.0 && u[2] == 0.0) settle_resting_cell(f, cell, zeroth[cell], lat);
  }
}

std::size_t initialize(PopulationField& f, const ScalarField& phi, const VectorField& velocity, double density) {
  std::size_t near_vacuum = 0;
  ScalarField m0(phi.grid());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0)) {
      throw ConfigError("void fraction must be positive, got " + std::to_string(phi[i]) + " at cell " +
                        std::to_string(i));
    }
    if (phi[i] < 0.01) ++near_vacuum;
    m0[i] = density * phi[i];
  }
  fill_equilibrium(f, m0, velocity);
  return near_vacuum;
}

// --------------------------------------------------------------------------
// Fused collide + push-stream kernel
//
// Each (y, z) row is collided into a contiguous row buffer, a loop over x the
// compiler can vectorize, and then streamed by shifted copies into the target
// rows of the next buffer. Vector and scalar code perform the same IEEE
// operations in the same order, so the result does not depend on vector width.

namespace {

template <int N, class F>
inline void unroll(F&& f) {
  detail::static_for<N>(std::forward<F>(f));
}

inline int wrap(int v, int n) { return v < 0 ? v + n : (v >= n ? v - n : v); }

struct KernelArgs {
  const double* phi_int = nullptr;
  std::array<const double*, 3> grad{};
  std::array<const double*, 3> ext{};
  double omega = 1.0;
  double prefactor = 0.0;
  double dt = 1.0;
};

template <int D>
inline bool collide_row(const KernelArgs& a, int n, std::size_t cells, std::size_t row, const double* __restrict cur,
                        double* __restrict post) {
  using S = stencil::Flow<D>;
  constexpr int Q = S::q;
  const double* __restrict phi_int = a.phi_int + row;
  std::array<const double*, 3> grad{};
  std::array<const double*, 3> ext{};
  for (int d = 0; d < D; ++d) {
    grad[d] = a.grad[d] + row;
    ext[d] = a.ext[d] + row;
  }
  const double omega = a.omega;
  const double prefactor = a.prefactor;
  const double dt = a.dt;
  const double inf = std::numeric_limits<double>::infinity();
  int bad = 0;

#pragma omp simd reduction(| : bad)
  for (int x = 0; x < n; ++x) {
    const std::size_t cell = row + static_cast<std::size_t>(x);
    double f[Q];
    unroll<Q>([&](auto ic) { f[ic] = cur[static_cast<std::size_t>(ic) * cells + cell]; });

    double m0 = 0.0;
    double j[3] = {0.0, 0.0, 0.0};
    unroll<Q>([&](auto ic) {
      constexpr IntVec c = S::c[ic];
      m0 += f[ic];
      if constexpr (c[0] != 0) j[0] += c[0] * f[ic];
      if constexpr (D > 1 && c[1] != 0) j[1] += c[1] * f[ic];
      if constexpr (D > 2 && c[2] != 0) j[2] += c[2] * f[ic];
    });
    const double pint = phi_int[x];
    bad |= static_cast<int>(!(m0 > 0.0)) | static_cast<int>(!(m0 < inf)) | static_cast<int>(!(pint > 0.0));
    const double rho = m0 / pint;

    double force[3] = {0.0, 0.0, 0.0};
    double u[3] = {0.0, 0.0, 0.0};
    unroll<D>([&](auto d) {
      force[d] = ext[d][x] + detail::pressure_correction_component(rho, grad[d][x]);
      u[d] = detail::velocity_component(j[d], force[d], m0, dt);
    });
    const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const double uf = u[0] * force[0] + u[1] * force[1] + u[2] * force[2];

    unroll<Q>([&](auto ic) {
      constexpr IntVec c = S::c[ic];
      constexpr double w = S::w[ic];
      const double cu = c[0] * u[0] + c[1] * u[1] + c[2] * u[2];
      const double cf = c[0] * force[0] + c[1] * force[1] + c[2] * force[2];
      const double feq = detail::equilibrium_value(w, m0, cu, usq);
      const double omega_f = detail::forcing_value(prefactor, w, cu, cf, uf);
      post[static_cast<std::size_t>(ic) * static_cast<std::size_t>(n) + static_cast<std::size_t>(x)] =
          detail::relax(f[ic], feq, omega, omega_f);
    });
  }
  return bad == 0;
}

template <int D>
inline void stream_row(int n, std::size_t cells, int y, int z, const double* __restrict post, double* __restrict nxt) {
  using S = stencil::Flow<D>;
  const auto un = static_cast<std::size_t>(n);
  unroll<S::q>([&](auto ic) {
    constexpr IntVec c = S::c[ic];
    const int ty = D > 1 ? wrap(y + c[1], n) : 0;
    const int tz = D > 2 ? wrap(z + c[2], n) : 0;
    double* dst = nxt + static_cast<std::size_t>(ic) * cells +
                  un * (static_cast<std::size_t>(ty) + un * static_cast<std::size_t>(tz));
    const double* src = post + static_cast<std::size_t>(ic) * un;
    if constexpr (c[0] == 0) {
      for (std::size_t x = 0; x < un; ++x) dst[x] = src[x];
    } else if constexpr (c[0] == 1) {
      for (std::size_t x = 0; x + 1 < un; ++x) dst[x + 1] = src[x];
      dst[0] = src[un - 1];
    } else {
      for (std::size_t x = 1; x < un; ++x) dst[x - 1] = src[x];
      dst[un - 1] = src[0];
    }
  });
}

template <int D>
bool collide_stream(const KernelArgs& a, int n, std::size_t cells, const double* cur, double* nxt) {
  const int ny = D > 1 ? n : 1;
  const int nz = D > 2 ? n : 1;
  const int rows = ny * nz;
  bool ok = true;
#pragma omp parallel reduction(&& : ok)
  {
    std::vector<double> post(static_cast<std::size_t>(stencil::Flow<D>::q) * static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (int r = 0; r < rows; ++r) {
      const int y = r % ny;
      const int z = r / ny;
      const std::size_t row = static_cast<std::size_t>(r) * static_cast<std::size_t>(n);
      ok = collide_row<D>(a, n, cells, row, cur, post.data()) && ok;
      stream_row<D>(n, cells, y, z, post.data(), nxt);
    }
  }
  return ok;
}

}  // namespace

Solver::Solver(const Grid& grid, const SchemeConfig& cfg)
    : lattice_(make_lattice(grid.dim())),
      config_(cfg),
      populations_(grid, lattice_.q),
      zeros_(grid.cells(), 0.0) {
  config_.validate();
}

void Solver::step(const StepInputs& in) {
  const Grid& g = grid();
  if (in.cell_void == nullptr) throw UsageError("step requires the cell void integral field");
  if (!(in.cell_void->grid() == g) || (in.void_gradient && !(in.void_gradient->grid() == g)) ||
      (in.external_force && !(in.external_force->grid() == g))) {
    throw UsageError("step inputs live on a different grid");
  }
  KernelArgs a;
  a.phi_int = in.cell_void->span().data();
  for (int d = 0; d < 3; ++d) {
    a.grad[d] = in.void_gradient ? in.void_gradient->component(d).data() : zeros_.data();
    a.ext[d] = in.external_force ? in.external_force->component(d).data() : zeros_.data();
  }
  a.omega = config_.dt / config_.tau;
  a.prefactor = 1.0 - config_.dt / (2.0 * config_.tau);
  a.dt = config_.dt;

  const double* cur = populations_.current().data();
  double* nxt = populations_.next().data();
  bool ok = true;
  switch (g.dim()) {
    case 1:
      ok = collide_stream<1>(a, g.n(), g.cells(), cur, nxt);
      break;
    case 2:
      ok = collide_stream<2>(a, g.n(), g.cells(), cur, nxt);
      break;
    default:
      ok = collide_stream<3>(a, g.n(), g.cells(), cur, nxt);
      break;
  }
  if (!ok) {
    // Locate the first offending cell in index order for a reproducible report.
    for (std::size_t cell = 0; cell < g.cells(); ++cell) {
      double m0 = 0.0;
      for (int i = 0; i < lattice_.q; ++i) m0 += populations_.at(i, cell);
      if (!(m0 > 0.0) || !std::isfinite(m0)) {
        throw NumericalBreakdown("non-positive or non-finite zeroth moment", steps_, cell);
      }
      if (!((*in.cell_void)[cell] > 0.0)) throw NumericalBreakdown("non-positive cell void integral", steps_, cell);
    }
    throw NumericalBreakdown("numerical breakdown", steps_, 0);
  }
  populations_.swap();
  ++steps_;
}

void Solver::macroscopic(const StepInputs& in, ScalarField& density, VectorField& velocity,
                         ScalarField* zeroth) const {
  const Grid& g = grid();
  if (in.cell_void == nullptr) throw UsageError("macroscopic requires the cell void integral field");
  std::vector<double> f(static_cast<std::size_t>(lattice_.q));
  for (std::size_t cell = 0; cell < g.cells(); ++cell) {
    for (int i = 0; i < lattice_.q; ++i) f[static_cast<std::size_t>(i)] = populations_.at(i, cell);
    // Force needs the density first: rho = m0 / Phi, then F = F_ext + F_PC(rho).
    double m0 = 0.0;
    for (double v : f) m0 += v;
    const double phi_int = (*in.cell_void)[cell];
    const double rho = m0 / phi_int;
    Vec3 force{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d) {
      const double gr = in.void_gradient ? (*in.void_gradient)(d, cell) : 0.0;
      const double e = in.external_force ? (*in.external_force)(d, cell) : 0.0;
      force[d] = e + detail::pressure_correction_component(rho, gr);
    }
    const CellMacro m = macro_from_populations(f, phi_int, force, config_, lattice_, steps_, cell);
    density[cell] = m.density;
    velocity.set(cell, m.velocity);
    if (zeroth) (*zeroth)[cell] = m.zeroth;
  }
}

double Solver::total_mass() const {
  double sum = 0.0;
  const Grid& g = grid();
  for (std::size_t cell = 0; cell < g.cells(); ++cell) {
    for (int i = 0; i < lattice_.q; ++i) sum += populations_.at(i, cell);
  }
  return sum;
}

}  // namespace vanse
