#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "vanse/fields.hpp"

namespace vanse {

struct Norms {
  double l1 = 0.0;    ///< mean absolute deviation
  double l2 = 0.0;    ///< root mean square deviation
  double linf = 0.0;  ///< maximum deviation
};

/// Nodal deviation norms. Throws UsageError if the grids differ.
Norms error_norms(const ScalarField& sim, const ScalarField& exact);
/// Vector version: the per-node deviation is the Euclidean norm over the grid dimension.
Norms error_norms(const VectorField& sim, const VectorField& exact);
/// Norms of precomputed non-negative nodal deviations.
Norms norms_of_deviations(const std::vector<double>& deviations);

/// Experimental order of convergence log(e_coarse / e_fine) / log(ratio).
/// Returns NaN when either error is not positive or ratio <= 1.
double eoc(double e_coarse, double e_fine, double ratio = 2.0);

/// True when every series changed by at most tol (relative to the latest
/// value) over the last `window` samples. Each inner vector is one tracked
/// norm sampled at equal intervals. Needs at least two samples in the window.
bool steady_detector(const std::vector<std::vector<double>>& history, std::size_t window, double tol);

/// Physical/lattice conversion factors under diffusive scaling.
struct UnitConverter {
  double dx = 0.0;   ///< m
  double dt = 0.0;   ///< s
  double rho = 1.0;  ///< kg/m^3
  double tau = 0.5;
  double nu = 0.0;   ///< physical kinematic viscosity, m^2/s

  double velocity_factor() const { return dx / dt; }
  double viscosity_factor() const { return dx * dx / dt; }
  double pressure_factor() const { return rho * velocity_factor() * velocity_factor(); }
  double force_factor() const { return rho * dx / (dt * dt); }

  double to_lattice_velocity(double u) const { return u / velocity_factor(); }
  double to_physical_velocity(double u) const { return u * velocity_factor(); }
  double to_lattice_pressure(double p) const { return p / pressure_factor(); }
  double to_physical_pressure(double p) const { return p * pressure_factor(); }
  double to_lattice_force(double f) const { return f / force_factor(); }
  double to_physical_force(double f) const { return f * force_factor(); }
  /// (tau - 1/2) c_s^2 C_nu.
  double physical_viscosity() const { return (tau - 0.5) / 3.0 * viscosity_factor(); }
};

/// dx = length / n, dt = (tau - 1/2) c_s^2 dx^2 / nu. Throws ConfigError for
/// tau <= 1/2, n < 4 or non-positive nu, length or rho.
UnitConverter make_converter(int n, double tau, double nu = 0.1, double length = 2.0, double rho = 1.0);

struct ErrorReport {
  std::string case_id;
  int n = 0;
  double time = 0.0;  ///< physical evaluation time, s
  long steps = 0;
  Norms velocity;
  Norms pressure;
};

/// Errors over increasing resolutions with pairwise EOCs.
class ConvergenceTable {
 public:
  /// Appends a report; resolutions must strictly increase.
  void add(const ErrorReport& r);

  const std::vector<ErrorReport>& reports() const { return reports_; }

  /// EOC between rows i-1 and i for the given quantity ("velocity" or
  /// "pressure") and norm ("L1", "L2", "Linf"). NaN for i == 0.
  double eoc_at(std::size_t i, const std::string& quantity, const std::string& norm) const;
  /// Mean of the pairwise EOCs for one quantity and norm.
  double mean_eoc(const std::string& quantity, const std::string& norm) const;

  /// CSV with columns case,n,quantity,norm,value,eoc; 17 significant digits.
  void write_csv(std::ostream& os) const;
  /// Aligned plain-text table.
  void print(std::ostream& os) const;

 private:
  std::vector<ErrorReport> reports_;
};

/// Single-row variant of ConvergenceTable::write_csv, eoc column left empty.
void write_errors_csv(const ErrorReport& r, std::ostream& os);

/// Norm selection by name; throws UsageError for unknown names.
double norm_value(const ErrorReport& r, const std::string& quantity, const std::string& norm);

}  // namespace vanse
