#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vanse/analysis.hpp"
#include "vanse/kernel.hpp"
#include "vanse/mms.hpp"

namespace vanse {

/// How the populations are seeded at t = 0.
enum class InitMode {
  /// Equilibrium with m0 = phi (local void fraction, unit density) and the
  /// analytic velocity.
  local,
  /// Equilibrium whose moments reproduce the analytic fields through the
  /// scheme's own definitions: m0 = Phi (1 + p / (c_s^2 C_p)) and a velocity
  /// shifted by the half-step force, so macroscopic fields at step 0 equal
  /// the analytic ones.
  consistent,
};

std::string to_string(InitMode m);
InitMode parse_init_mode(std::string_view text);

struct RunConfig {
  std::string case_id = "stat2d";
  CaseOptions case_options;
  int n = 32;
  std::vector<int> resolutions;     ///< convergence studies only
  std::optional<double> tau;        ///< default from the case
  SchemeVariant variant = SchemeVariant::consistent;
  int quadrature_dims = 0;          ///< 0 selects the case default
  InitMode init = InitMode::consistent;
  double nu = 0.1;
  double rho = 1.0;

  // Stationary termination.
  long steady_window = 1000;        ///< steps between compared norm samples
  double steady_tol = 1e-6;
  double max_time = 10.0;           ///< s, cap for stationary cases

  // Transient termination.
  double eval_time = 4.0;           ///< s, first evaluation
  int max_periods = 1;              ///< extra periods allowed while norms still change
  double period_tol = 1e-2;         ///< relative change between period evaluations

  long log_every = 1000;            ///< steps between progress lines, 0 disables
  long snapshot_every = 0;          ///< steps between snapshots, 0 disables
  std::string out_dir;              ///< empty: no files
  int workers = 0;                  ///< 0 keeps the OpenMP default
  bool parallel_runs = false;       ///< convergence studies: run resolutions concurrently

  double effective_tau(const ManufacturedCase& c) const { return tau ? *tau : c.default_tau(); }
  /// Throws UsageError / ConfigError for inconsistent settings.
  void validate() const;
};

/// One resolution of one case: owns the solver and the per-step inputs.
class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg);
  Simulation(const RunConfig& cfg, std::unique_ptr<ManufacturedCase> mcase);

  const ManufacturedCase& mms_case() const { return *case_; }
  const UnitConverter& units() const { return units_; }
  const Solver& solver() const { return solver_; }
  Solver& solver() { return solver_; }
  const Grid& grid() const { return grid_; }
  long step_count() const { return solver_.steps_taken(); }
  double time() const { return static_cast<double>(step_count()) * units_.dt; }

  /// Seeds populations at t = 0 according to the configured init mode.
  void initialize();
  /// Advances by one lattice time step.
  void advance();
  /// Errors of the current state against the analytic fields.
  ErrorReport evaluate();

  /// Simulated physical fields at the current time.
  struct Snapshot {
    explicit Snapshot(const Grid& g) : phi(g), density(g), velocity(g), pressure(g) {}
    ScalarField phi;
    ScalarField density;   ///< effective density, lattice units
    VectorField velocity;  ///< m/s
    ScalarField pressure;  ///< Pa, zero spatial mean
  };
  Snapshot snapshot();

  void write_snapshot_csv(const std::string& path);
  void write_snapshot_vtk(const std::string& path);

 private:
  /// Refreshes phi, Phi, grad(phi) and F_MMS for the time of the current step.
  void prepare_inputs();
  StepInputs inputs() const;

  RunConfig cfg_;
  std::unique_ptr<ManufacturedCase> case_;
  UnitConverter units_;
  Grid grid_;
  NeighborTable nb_;
  SchemeConfig scheme_;
  Solver solver_;
  FluidProperties fluid_;
  MmsForceAssembler assembler_;

  ScalarField phi_;
  ScalarField cell_void_;
  VectorField grad_;
  VectorField force_;  ///< F_MMS in lattice units
  long prepared_step_ = -1;
};

/// Runs one configuration to its termination rule. Writes errors.csv,
/// manifest.txt and snapshots into cfg.out_dir when it is set. Progress lines
/// go to `log` when non-null.
ErrorReport run_single(const RunConfig& cfg, std::ostream* log = nullptr);

/// Runs every resolution in cfg.resolutions (at least 3, strictly increasing)
/// and writes convergence.csv and manifest.txt when cfg.out_dir is set.
ConvergenceTable run_convergence(const RunConfig& cfg, std::ostream* log = nullptr);

/// Default resolution set for a case dimension.
std::vector<int> default_resolutions(int dim);

/// Human-readable dump of the effective configuration.
void write_manifest(const RunConfig& cfg, const ManufacturedCase& c, std::ostream& os);

}  // namespace vanse
