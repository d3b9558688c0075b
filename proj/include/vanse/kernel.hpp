#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vanse/fields.hpp"
#include "vanse/lattice.hpp"

namespace vanse {

enum class SchemeVariant {
  consistent,  ///< zeroth moment divided by the quadrature-integrated void fraction
  legacy,      ///< zeroth moment divided by the local void fraction
};

std::string to_string(SchemeVariant v);
SchemeVariant parse_scheme_variant(std::string_view text);

struct SchemeConfig {
  double tau = 0.53;
  SchemeVariant variant = SchemeVariant::consistent;
  int quadrature_dims = 1;
  double dt = 1.0;

  /// Throws ConfigError when tau <= dt/2 or the quadrature count is not 1..3.
  void validate() const;
  /// nu = (tau - dt/2) c_s^2 in lattice units.
  double lattice_viscosity() const { return (tau - 0.5 * dt) / 3.0; }
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Tensor3 = std::array<Mat3, 3>;

/// Zeroth to third velocity moments of a set of Q values.
struct Moments {
  double m0 = 0.0;
  Vec3 m1{};
  Mat3 m2{};
  Tensor3 m3{};
};

struct CellMacro {
  double zeroth = 0.0;   ///< sum_i f_i
  double density = 0.0;  ///< effective density, zeroth / cell void integral
  Vec3 velocity{};
};

namespace detail {

// Shared by the scalar API and the fused kernels so both produce identical bits.
// c_s^2 = 1/3, hence the literal 3, 4.5 and 9.
inline double equilibrium_value(double w, double m0, double cu, double usq) {
  return w * m0 * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
}

inline double forcing_value(double prefactor, double w, double cu, double cf, double uf) {
  return prefactor * w * (3.0 * (cf - uf) + 9.0 * cu * cf);
}

inline double pressure_correction_component(double density, double grad) { return density * (1.0 / 3.0) * grad; }

inline double velocity_component(double momentum, double force, double m0, double dt) {
  return (momentum + 0.5 * dt * force) / m0;
}

inline double relax(double f, double feq, double omega, double forcing) { return f + omega * (feq - f) + forcing; }

}  // namespace detail

/// Second-order truncated equilibrium for direction i with zeroth moment m0.
double equilibrium(int i, double m0, const Vec3& u, const LatticeDescriptor& lat);

/// Guo forcing term (1 - dt/2tau) w_i [(xi - u)/cs2 + (xi.u) xi/cs4] . F.
double guo_forcing_term(int i, const Vec3& u, const Vec3& force, const SchemeConfig& cfg,
                        const LatticeDescriptor& lat);

/// Pressure correction force rho c_s^2 grad(phi), lattice units.
Vec3 pressure_correction_force(double density, const Vec3& grad_phi);

/// Effective density and velocity of one cell. Throws NumericalBreakdown if
/// the zeroth moment or the cell void integral is not positive and finite.
CellMacro macro_from_populations(std::span<const double> f, double cell_void, const Vec3& force,
                                 const SchemeConfig& cfg, const LatticeDescriptor& lat, long step = 0,
                                 std::size_t cell = 0);

/// Void fraction seen by the zeroth moment at c: the quadrature integral for
/// the consistent variant, the local value for the legacy one.
double cell_void_integral(const ScalarField& phi, const IntVec& c, const SchemeConfig& cfg);
void cell_void_integral(const ScalarField& phi, const SchemeConfig& cfg, const NeighborTable& nb,
                        ScalarField& out);

/// Closed-form equilibrium moments. The third moment follows the
/// m0 u delta_{abc} form, so only its fully diagonal entries are non-zero.
Moments equilibrium_moments(double m0, const Vec3& u, const LatticeDescriptor& lat);

/// Full third moment of the discrete equilibrium,
/// m0 c_s^2 (u_a d_bc + u_b d_ac + u_c d_ab), restricted to the lattice axes.
Tensor3 full_equilibrium_third_moment(double m0, const Vec3& u, const LatticeDescriptor& lat);

/// Direct summation sum_i xi..xi values_i.
Moments population_moments(std::span<const double> values, const LatticeDescriptor& lat);

/// Per-cell inputs of one step. Lattice units throughout.
struct StepInputs {
  const ScalarField* cell_void = nullptr;      ///< Phi
  const VectorField* void_gradient = nullptr;  ///< grad(phi), null means zero
  const VectorField* external_force = nullptr; ///< force density besides F_PC, null means zero
};

/// Populations f_i = equilibrium(i, m0(c), u(c)).
void fill_equilibrium(PopulationField& f, const ScalarField& zeroth, const VectorField& velocity);

/// Seeds f_i = equilibrium(i, density * phi, u) from the local void fraction.
/// Throws ConfigError if phi <= 0 anywhere; returns the number of cells with
/// phi < 0.01 (outside the validated regime).
std::size_t initialize(PopulationField& f, const ScalarField& phi, const VectorField& velocity,
                       double density = 1.0);

/// BGK + Guo lattice Boltzmann solver on a periodic grid. Each step runs the
/// fused collide and push-stream sweep, then swaps buffers.
class Solver {
 public:
  Solver(const Grid& grid, const SchemeConfig& cfg);

  const Grid& grid() const { return populations_.grid(); }
  const LatticeDescriptor& lattice() const { return lattice_; }
  const SchemeConfig& config() const { return config_; }

  PopulationField& populations() { return populations_; }
  const PopulationField& populations() const { return populations_; }

  long steps_taken() const { return steps_; }

  /// One collide + stream + swap. Throws NumericalBreakdown on a
  /// non-positive or non-finite zeroth moment.
  void step(const StepInputs& in);

  /// Effective density, velocity and optionally the zeroth moment of the
  /// current populations for the given inputs.
  void macroscopic(const StepInputs& in, ScalarField& density, VectorField& velocity,
                   ScalarField* zeroth = nullptr) const;

  /// Sum over all cells and directions, in fixed order.
  double total_mass() const;

 private:
  LatticeDescriptor lattice_;
  SchemeConfig config_;
  PopulationField populations_;
  long steps_ = 0;
  std::vector<double> zeros_;  ///< stands in for absent gradient or force inputs
};

}  // namespace vanse
