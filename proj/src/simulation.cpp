#include "vanse/simulation.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vanse/errors.hpp"

namespace vanse {

std::string to_string(InitMode m) { return m == InitMode::local ? "local" : "consistent"; }

InitMode parse_init_mode(std::string_view text) {
  if (text == "local") return InitMode::local;
  if (text == "consistent") return InitMode::consistent;
  throw UsageError("unknown init mode '" + std::string(text) + "' (expected local|consistent)");
}

void RunConfig::validate() const {
  if (n < 4) throw UsageError("resolution must be at least 4");
  if (tau && !(*tau > 0.5)) throw ConfigError("relaxation time must exceed 1/2");
  if (quadrature_dims < 0 || quadrature_dims > 3) throw UsageError("quadrature dimension count must be 0..3");
  if (steady_window < 1) throw UsageError("steady window must be at least one step");
  if (!(steady_tol > 0.0)) throw UsageError("steady tolerance must be positive");
  if (!(max_time > 0.0)) throw UsageError("maximum time must be positive");
  if (!(eval_time >= 0.0)) throw UsageError("evaluation time must be non-negative");
  if (max_periods < 0) throw UsageError("period count must be non-negative");
  if (log_every < 0 || snapshot_every < 0) throw UsageError("intervals must be non-negative");
  if (workers < 0) throw UsageError("worker count must be non-negative");
}

std::vector<int> default_resolutions(int dim) {
  if (dim == 1) return {32, 64, 128, 256};
  if (dim == 3) return {8, 16, 32};
  return {16, 32, 64, 128};
}

namespace {

SchemeConfig scheme_for(const RunConfig& cfg, const ManufacturedCase& c) {
  SchemeConfig s;
  s.tau = cfg.effective_tau(c);
  s.variant = cfg.variant;
  s.quadrature_dims = cfg.quadrature_dims > 0 ? cfg.quadrature_dims : c.variation_dims();
  s.dt = 1.0;
  if (s.quadrature_dims > c.dim()) throw ConfigError("quadrature dimension count exceeds the case dimension");
  return s;
}

std::unique_ptr<ManufacturedCase> build_case(const RunConfig& cfg) {
  cfg.validate();
  return make_case(cfg.case_id, cfg.case_options);
}

}  // namespace

Simulation::Simulation(const RunConfig& cfg) : Simulation(cfg, build_case(cfg)) {}

Simulation::Simulation(const RunConfig& cfg, std::unique_ptr<ManufacturedCase> mcase)
    : cfg_(cfg),
      case_(std::move(mcase)),
      units_(make_converter(cfg.n, cfg.effective_tau(*case_), cfg.nu, case_->length(), cfg.rho)),
      grid_(case_->dim(), cfg.n),
      nb_(grid_),
      scheme_(scheme_for(cfg, *case_)),
      solver_(grid_, scheme_),
      fluid_{cfg.nu, cfg.rho},
      assembler_(*case_, grid_, units_.dx, units_.dt, fluid_),
      phi_(grid_),
      cell_void_(grid_),
      grad_(grid_),
      force_(grid_) {
  cfg_.validate();
#ifdef _OPENMP
  if (cfg_.workers > 0) omp_set_num_threads(cfg_.workers);
#endif
}

StepInputs Simulation::inputs() const { return StepInputs{&cell_void_, &grad_, &force_}; }

void Simulation::prepare_inputs() {
  const long s = step_count();
  if (s == prepared_step_) return;
  if (prepared_step_ >= 0 && !case_->transient()) {
    prepared_step_ = s;
    return;
  }
  const double t = time();
  assembler_.assemble(t, force_);
  const double cf = units_.force_factor();
  for (int a = 0; a < grid_.dim(); ++a) {
    for (double& v : force_.component(a)) v /= cf;
  }
  const ScalarField& phi = assembler_.current().phi;
  for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] = phi[i];
  cell_void_integral(phi_, scheme_, nb_, cell_void_);
  central_gradient(phi_, 1.0, nb_, grad_);
  prepared_step_ = s;
}

void Simulation::initialize() {
  if (solver_.steps_taken() != 0) throw UsageError("initialize must precede the first step");
  prepared_step_ = -1;
  prepare_inputs();
  const FieldSample& exact = assembler_.current();
  const double cu = units_.velocity_factor();
  const std::size_t cells = grid_.cells();

  VectorField u(grid_);
  for (int a = 0; a < grid_.dim(); ++a) {
    for (std::size_t i = 0; i < cells; ++i) u(a, i) = exact.u(a, i) / cu;
  }

  if (cfg_.init == InitMode::local) {
    vanse::initialize(solver_.populations(), phi_, u, 1.0);
    return;
  }

  for (std::size_t i = 0; i < cells; ++i) {
    if (!(phi_[i] > 0.0)) throw ConfigError("void fraction must be positive at cell " + std::to_string(i));
  }
  ScalarField m0(grid_);
  const double cp = units_.pressure_factor();
  for (std::size_t i = 0; i < cells; ++i) {
    const double density = 1.0 + 3.0 * (exact.p[i] / cp);
    m0[i] = density * cell_void_[i];
    for (int a = 0; a < grid_.dim(); ++a) {
      const double f = force_(a, i) + detail::pressure_correction_component(density, grad_(a, i));
      u(a, i) -= 0.5 * f / m0[i];
    }
  }
  fill_equilibrium(solver_.populations(), m0, u);
}

void Simulation::advance() {
  prepare_inputs();
  solver_.step(inputs());
}

Simulation::Snapshot Simulation::snapshot() {
  prepare_inputs();
  Snapshot s(grid_);
  solver_.macroscopic(inputs(), s.density, s.velocity);
  const double cu = units_.velocity_factor();
  const double cp = units_.pressure_factor();
  double mean = 0.0;
  for (std::size_t i = 0; i < grid_.cells(); ++i) mean += s.density[i];
  mean /= static_cast<double>(grid_.cells());
  for (std::size_t i = 0; i < grid_.cells(); ++i) {
    s.phi[i] = phi_[i];
    s.pressure[i] = (s.density[i] - mean) / 3.0 * cp;
    for (int a = 0; a < grid_.dim(); ++a) s.velocity(a, i) *= cu;
  }
  return s;
}

ErrorReport Simulation::evaluate() {
  const Snapshot s = snapshot();
  const FieldSample& exact = assembler_.current();
  ScalarField p_exact(grid_);
  double mean = 0.0;
  for (std::size_t i = 0; i < grid_.cells(); ++i) mean += exact.p[i];
  mean /= static_cast<double>(grid_.cells());
  for (std::size_t i = 0; i < grid_.cells(); ++i) p_exact[i] = exact.p[i] - mean;

  ErrorReport r;
  r.case_id = case_->name();
  r.n = grid_.n();
  r.time = time();
  r.steps = step_count();
  r.velocity = error_norms(s.velocity, exact.u);
  r.pressure = error_norms(s.pressure, p_exact);
  return r;
}

void Simulation::write_snapshot_csv(const std::string& path) {
  const Snapshot s = snapshot();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  const int d = grid_.dim();
  const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < d; ++a) os << axes[a] << ',';
  os << "phi,density";
  for (int a = 0; a < d; ++a) os << ",u_" << axes[a];
  os << ",p\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid_.cells(); ++i) {
    const IntVec c = grid_.coords(i);
    for (int a = 0; a < d; ++a) os << c[a] * units_.dx << ',';
    os << s.phi[i] << ',' << s.density[i];
    for (int a = 0; a < d; ++a) os << ',' << s.velocity(a, i);
    os << ',' << s.pressure[i] << '\n';
  }
}

void Simulation::write_snapshot_vtk(const std::string& path) {
  const Snapshot s = snapshot();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  const int n = grid_.n();
  const int d = grid_.dim();
  os << "# vtk DataFile Version 3.0\n"
     << case_->name() << " step " << step_count() << "\nASCII\nDATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << n << ' ' << (d > 1 ? n : 1) << ' ' << (d > 2 ? n : 1) << '\n'
     << "ORIGIN 0 0 0\n"
     << "SPACING " << units_.dx << ' ' << units_.dx << ' ' << units_.dx << '\n'
     << "POINT_DATA " << grid_.cells() << '\n'
     << std::setprecision(10);
  auto scalars = [&](const char* name, const ScalarField& f) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < grid_.cells(); ++i) os << f[i] << '\n';
  };
  scalars("phi", s.phi);
  scalars("effective_density", s.density);
  scalars("pressure", s.pressure);
  os << "VECTORS velocity double\n";
  for (std::size_t i = 0; i < grid_.cells(); ++i) {
    os << s.velocity(0, i) << ' ' << s.velocity(1, i) << ' ' << s.velocity(2, i) << '\n';
  }
}

void write_manifest(const RunConfig& cfg, const ManufacturedCase& c, std::ostream& os) {
  const double tau = cfg.effective_tau(c);
  os << std::setprecision(17);
  os << "case = " << c.name() << '\n';
  os << "dimension = " << c.dim() << '\n';
  os << "transient = " << (c.transient() ? "true" : "false") << '\n';
  os << "as_printed = " << (cfg.case_options.as_printed ? "true" : "false") << '\n';
  if (!cfg.resolutions.empty()) {
    os << "resolutions =";
    for (int r : cfg.resolutions) os << ' ' << r;
    os << '\n';
  } else {
    os << "n = " << cfg.n << '\n';
    const UnitConverter u = make_converter(cfg.n, tau, cfg.nu, c.length(), cfg.rho);
    os << "dx = " << u.dx << '\n';
    os << "dt = " << u.dt << '\n';
  }
  os << "domain_length = " << c.length() << '\n';
  os << "tau = " << tau << '\n';
  os << "scheme = " << to_string(cfg.variant) << '\n';
  os << "quadrature_dims = " << (cfg.quadrature_dims > 0 ? cfg.quadrature_dims : c.variation_dims()) << '\n';
  os << "init = " << to_string(cfg.init) << '\n';
  os << "nu = " << cfg.nu << '\n';
  os << "rho = " << cfg.rho << '\n';
  if (c.transient()) {
    os << "eval_time = " << cfg.eval_time << '\n';
    os << "period = " << c.period() << '\n';
    os << "max_periods = " << cfg.max_periods << '\n';
    os << "period_tol = " << cfg.period_tol << '\n';
  } else {
    os << "steady_window = " << cfg.steady_window << '\n';
    os << "steady_tol = " << cfg.steady_tol << '\n';
    os << "max_time = " << cfg.max_time << '\n';
  }
  os << "snapshot_every = " << cfg.snapshot_every << '\n';
  os << "workers = " << cfg.workers << '\n';
  os << "parallel_runs = " << (cfg.parallel_runs ? "true" : "false") << '\n';
}

namespace {

void log_progress(std::ostream* log, const ErrorReport& r) {
  if (!log) return;
  *log << std::scientific << std::setprecision(4) << "  step " << r.steps << "  t=" << std::fixed
       << std::setprecision(4) << r.time << " s  u L2=" << std::scientific << r.velocity.l2
       << "  p L2=" << r.pressure.l2 << std::defaultfloat << '\n';
}

bool period_settled(const ErrorReport& a, const ErrorReport& b, double tol) {
  for (const char* q : {"velocity", "pressure"}) {
    for (const char* nm : {"L1", "L2", "Linf"}) {
      const double x = norm_value(a, q, nm);
      const double y = norm_value(b, q, nm);
      if (std::abs(x - y) > tol * std::abs(y)) return false;
    }
  }
  return true;
}

void prepare_out_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void maybe_snapshot(Simulation& sim, const RunConfig& cfg) {
  if (cfg.out_dir.empty() || cfg.snapshot_every <= 0) return;
  if (sim.step_count() % cfg.snapshot_every != 0) return;
  const std::string stem = join(cfg.out_dir, "snapshot_" + std::to_string(sim.step_count()));
  sim.write_snapshot_csv(stem + ".csv");
  sim.write_snapshot_vtk(stem + ".vtk");
}

ErrorReport run_transient(Simulation& sim, const RunConfig& cfg, std::ostream* log) {
  const double dt = sim.units().dt;
  auto advance_to = [&](long target) {
    while (sim.step_count() < target) {
      sim.advance();
      maybe_snapshot(sim, cfg);
      if (cfg.log_every > 0 && sim.step_count() % cfg.log_every == 0 && sim.step_count() < target) {
        log_progress(log, sim.evaluate());
      }
    }
  };
  advance_to(std::lround(cfg.eval_time / dt));
  ErrorReport report = sim.evaluate();
  log_progress(log, report);
  const double period = sim.mms_case().period();
  if (period <= 0.0) return report;
  for (int k = 1; k <= cfg.max_periods; ++k) {
    advance_to(std::lround((cfg.eval_time + k * period) / dt));
    ErrorReport next = sim.evaluate();
    log_progress(log, next);
    const bool settled = period_settled(report, next, cfg.period_tol);
    report = next;
    if (settled) break;
  }
  return report;
}

ErrorReport run_stationary(Simulation& sim, const RunConfig& cfg, std::ostream* log) {
  const long cap = std::lround(cfg.max_time / sim.units().dt);
  std::vector<std::vector<double>> history(6);
  auto record = [&](const ErrorReport& r) {
    std::size_t k = 0;
    for (const char* q : {"velocity", "pressure"}) {
      for (const char* nm : {"L1", "L2", "Linf"}) history[k++].push_back(norm_value(r, q, nm));
    }
  };
  record(sim.evaluate());
  while (sim.step_count() < cap) {
    sim.advance();
    maybe_snapshot(sim, cfg);
    const bool sample = sim.step_count() % cfg.steady_window == 0;
    const bool logline = cfg.log_every > 0 && sim.step_count() % cfg.log_every == 0;
    if (!sample && !logline) continue;
    const ErrorReport r = sim.evaluate();
    if (logline) log_progress(log, r);
    if (sample) {
      record(r);
      if (steady_detector(history, 2, cfg.steady_tol)) return r;
    }
  }
  const ErrorReport r = sim.evaluate();
  log_progress(log, r);
  return r;
}

}  // namespace

ErrorReport run_single(const RunConfig& cfg, std::ostream* log) {
  Simulation sim(cfg);
  prepare_out_dir(cfg.out_dir);
  if (!cfg.out_dir.empty()) {
    std::ofstream m(join(cfg.out_dir, "manifest.txt"));
    write_manifest(cfg, sim.mms_case(), m);
  }
  if (log) {
    *log << sim.mms_case().name() << " n=" << cfg.n << " tau=" << cfg.effective_tau(sim.mms_case())
         << " scheme=" << to_string(cfg.variant) << " dt=" << sim.units().dt << " s\n";
  }
  sim.initialize();
  maybe_snapshot(sim, cfg);
  const ErrorReport report =
      sim.mms_case().transient() ? run_transient(sim, cfg, log) : run_stationary(sim, cfg, log);
  if (!cfg.out_dir.empty()) {
    std::ofstream os(join(cfg.out_dir, "errors.csv"));
    write_errors_csv(report, os);
  }
  return report;
}

ConvergenceTable run_convergence(const RunConfig& cfg, std::ostream* log) {
  if (cfg.resolutions.size() < 3) throw UsageError("a convergence study needs at least 3 resolutions");
  for (std::size_t i = 1; i < cfg.resolutions.size(); ++i) {
    if (cfg.resolutions[i] <= cfg.resolutions[i - 1]) throw UsageError("resolutions must strictly increase");
  }
  const auto mcase = build_case(cfg);
  prepare_out_dir(cfg.out_dir);
  if (!cfg.out_dir.empty()) {
    std::ofstream m(join(cfg.out_dir, "manifest.txt"));
    write_manifest(cfg, *mcase, m);
  }
  auto single_for = [&](int n) {
    RunConfig single = cfg;
    single.n = n;
    single.resolutions.clear();
    single.out_dir.clear();
    single.snapshot_every = 0;
    return single;
  };
  ConvergenceTable table;
  if (cfg.parallel_runs) {
    // Progress lines from concurrent runs would interleave, so they are dropped.
    std::vector<std::future<ErrorReport>> pending;
    for (int n : cfg.resolutions) {
      pending.push_back(std::async(std::launch::async, [single = single_for(n)] { return run_single(single); }));
    }
    for (auto& f : pending) table.add(f.get());
  } else {
    for (int n : cfg.resolutions) table.add(run_single(single_for(n), log));
  }
  if (!cfg.out_dir.empty()) {
    std::ofstream os(join(cfg.out_dir, "convergence.csv"));
    table.write_csv(os);
  }
  return table;
}

}  // namespace vanse
