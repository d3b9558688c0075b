#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "vanse/fields.hpp"
#include "vanse/lattice.hpp"

namespace vanse {

/// Analytic void fraction, velocity and pressure at one point, physical units.
struct FieldValues {
  double phi = 1.0;
  Vec3 u{0.0, 0.0, 0.0};
  double p = 0.0;
};

/// Sampled fields on a grid at one time level.
struct FieldSample {
  explicit FieldSample(const Grid& g) : phi(g), u(g), p(g) {}
  ScalarField phi;
  VectorField u;
  ScalarField p;
};

/// A manufactured solution. Coordinates are physical (m), time in s.
class ManufacturedCase {
 public:
  virtual ~ManufacturedCase() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual bool transient() const = 0;
  /// Number of directions in which phi varies; selects the quadrature stencil.
  virtual int variation_dims() const = 0;
  /// Time after which all fields repeat; zero for stationary cases.
  virtual double period() const { return 0.0; }
  /// Edge length of the periodic domain.
  virtual double length() const { return 2.0; }
  virtual double default_tau() const { return transient() ? 0.5075 : 0.53; }

  virtual FieldValues evaluate(const Vec3& x, double t) const = 0;

  /// Samples every node x_c = c * dx of the grid. The default calls
  /// evaluate per node; the built-in cases override it with separable tables.
  virtual void sample(const Grid& g, double dx, double t, FieldSample& out) const;
};

struct CaseOptions {
  bool as_printed = false;  ///< verbatim time-independent fields for tran3d
  // Constant fields of the "uniform" case.
  double uniform_phi = 1.0;
  Vec3 uniform_u{0.0, 0.0, 0.0};
  double uniform_p = 0.0;
  int uniform_dim = 2;
  std::string table_path;  ///< file for the "table" case
};

/// stat2d, stat3d, tran1d, tran2d, tran3d, uniform, or table.
/// Throws UsageError for an unknown id.
std::unique_ptr<ManufacturedCase> make_case(const std::string& id, const CaseOptions& options = {});

/// Identifiers accepted by make_case (without "table", which needs a file).
std::vector<std::string> builtin_case_ids();

/// Tabulated fields read from a text file, interpolated multilinearly in
/// space (periodic) and linearly in time.
///
/// Format, whitespace separated, '#' starts a comment:
///   dim <d>  n <cells per axis>  length <m>  period <s>  variation_dims <k>
///   frame <time>
///   <phi> <u_1 .. u_d> <p>     one line per node in x-fastest order
///   frame <time> ...
/// A period of 0 marks a stationary table with exactly one frame.
class TabulatedCase : public ManufacturedCase {
 public:
  static std::unique_ptr<TabulatedCase> load(const std::string& path);

  std::string name() const override { return "table"; }
  int dim() const override { return dim_; }
  bool transient() const override { return period_ > 0.0; }
  int variation_dims() const override { return variation_dims_; }
  double period() const override { return period_; }
  double length() const override { return length_; }
  FieldValues evaluate(const Vec3& x, double t) const override;

 private:
  struct Frame {
    double time = 0.0;
    std::vector<FieldValues> nodes;
  };
  FieldValues spatial(const Frame& f, const Vec3& x) const;

  int dim_ = 1;
  int n_ = 0;
  double length_ = 2.0;
  double period_ = 0.0;
  int variation_dims_ = 1;
  std::vector<Frame> frames_;
};

/// Physical constants entering the momentum residual.
struct FluidProperties {
  double nu = 0.1;   ///< kinematic viscosity, m^2/s
  double rho = 1.0;  ///< density, kg/m^3
};

/// Momentum residual of the manufactured fields at x, t by central differences
/// with spacings hx (space) and ht (time); the viscous term is a central
/// divergence of centrally differenced stresses.
Vec3 mms_force(const ManufacturedCase& c, const Vec3& x, double t, double hx, double ht,
               const FluidProperties& fluid = {});

/// Continuity residual d_t(phi rho) + div(phi rho u) by central differences.
double mass_residual(const ManufacturedCase& c, const Vec3& x, double t, double hx, double ht,
                     const FluidProperties& fluid = {});

/// Grid-wide mms_force with hx = grid spacing and ht = time step, reusing
/// samples at t - ht, t, t + ht. Calls at t, t + ht, ... slide the window so
/// each time level is sampled once.
class MmsForceAssembler {
 public:
  MmsForceAssembler(const ManufacturedCase& c, const Grid& g, double dx, double dt, const FluidProperties& fluid);

  /// Force density at time t into out (physical units).
  void assemble(double t, VectorField& out);

  /// Fields sampled at the last assembled time.
  const FieldSample& current() const { return *levels_[1]; }

 private:
  void ensure_levels(double t);
  FieldSample& level(int k) { return *levels_[static_cast<std::size_t>(k + 1)]; }

  const ManufacturedCase& case_;
  Grid grid_;
  NeighborTable nb_;
  double dx_;
  double dt_;
  FluidProperties fluid_;
  std::array<std::unique_ptr<FieldSample>, 3> levels_;
  bool have_levels_ = false;
  double level_time_ = 0.0;
  std::array<std::vector<double>, 9> stress_;
};

}  // namespace vanse
