// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `acceptance 3 4 5`.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vanse/simulation.hpp"

using namespace vanse;
namespace fs = std::filesystem;

namespace {

const char* kQuantities[] = {"velocity", "pressure"};
const char* kNorms[] = {"L1", "L2", "Linf"};

void info(const std::string& line) { std::cout << "  " << line << '\n' << std::flush; }

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

RunConfig base_config(const std::string& id) {
  RunConfig cfg;
  cfg.case_id = id;
  cfg.log_every = 0;
  return cfg;
}

// Convergence tables are shared between criteria 1 and 7.
std::map<std::string, ConvergenceTable> g_tables;

const ConvergenceTable& table_for(const std::string& id) {
  auto it = g_tables.find(id);
  if (it != g_tables.end()) return it->second;
  RunConfig cfg = base_config(id);
  cfg.resolutions = default_resolutions(make_case(id)->dim());
  const auto start = std::chrono::steady_clock::now();
  ConvergenceTable t = run_convergence(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  t.print(os);
  std::istringstream lines(os.str());
  std::string line;
  info(id + " (" + fmt(secs, 4) + " s)");
  while (std::getline(lines, line)) info("  " + line);
  return g_tables.emplace(id, std::move(t)).first->second;
}

bool criterion1() {
  bool ok = true;
  for (const std::string id : {"stat2d", "tran1d", "tran2d"}) {
    const ConvergenceTable& t = table_for(id);
    for (const char* q : kQuantities) {
      for (const char* nm : kNorms) {
        const double m = t.mean_eoc(q, nm);
        const bool good = m >= 1.8 && m <= 2.2;
        std::string pairs;
        bool pairs_in_band = true;
        for (std::size_t i = 1; i < t.reports().size(); ++i) {
          const double e = t.eoc_at(i, q, nm);
          pairs += " " + fmt(e);
          pairs_in_band = pairs_in_band && e >= 1.8 && e <= 2.2;
        }
        // The mean of pairwise orders telescopes to the coarsest-to-finest slope, so
        // a single anomalous resolution can hide inside it; flag that separately.
        info(id + " " + q + " " + nm + ": mean EOC " + fmt(m) + " (pairwise" + pairs + ")" +
             (good ? "" : "  <-- mean outside [1.8, 2.2]") + (pairs_in_band ? "" : "  [note: pairwise outlier]"));
        ok = ok && good;
      }
    }
  }
  return ok;
}

bool criterion2() {
  const ConvergenceTable& t = table_for("stat3d");
  bool ok = true;
  for (const char* q : kQuantities) {
    const double m = t.mean_eoc(q, "L2");
    std::string pairs;
    for (std::size_t i = 1; i < t.reports().size(); ++i) pairs += " " + fmt(t.eoc_at(i, q, "L2"));
    info(std::string("stat3d ") + q + " L2: mean EOC " + fmt(m) + " (pairwise" + pairs + ")");
    ok = ok && m >= 1.7;
  }
  return ok;
}

bool criterion3() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-0.1, 0.1);
  double worst_eq = 0.0;
  double worst_force = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const auto lat = make_lattice(d);
    for (int s = 0; s < 1000; ++s) {
      const double m0 = 0.05 + 0.95 * unit(rng);
      Vec3 u{0, 0, 0};
      Vec3 F{0, 0, 0};
      for (int a = 0; a < d; ++a) {
        u[a] = sym(rng);
        F[a] = sym(rng);
      }
      SchemeConfig cfg;
      cfg.tau = 0.501 + 1.5 * unit(rng);
      std::vector<double> feq(static_cast<std::size_t>(lat.q));
      std::vector<double> src(static_cast<std::size_t>(lat.q));
      for (int i = 0; i < lat.q; ++i) {
        feq[i] = equilibrium(i, m0, u, lat);
        src[i] = guo_forcing_term(i, u, F, cfg, lat);
      }
      const Moments direct = population_moments(feq, lat);
      const Moments closed = equilibrium_moments(m0, u, lat);
      auto rel = [&](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), m0); };
      worst_eq = std::max(worst_eq, rel(direct.m0, closed.m0));
      const Moments fm = population_moments(src, lat);
      const double pref = 1.0 - 1.0 / (2.0 * cfg.tau);
      const double fscale = std::max(1e-300, pref * 0.1);
      worst_force = std::max(worst_force, std::abs(fm.m0) / fscale);
      for (int a = 0; a < d; ++a) {
        worst_eq = std::max(worst_eq, rel(direct.m1[a], closed.m1[a]));
        worst_eq = std::max(worst_eq, rel(direct.m3[a][a][a], closed.m3[a][a][a]));
        worst_force = std::max(worst_force, std::abs(fm.m1[a] - pref * F[a]) / fscale);
        for (int b = 0; b < d; ++b) {
          worst_eq = std::max(worst_eq, rel(direct.m2[a][b], closed.m2[a][b]));
          worst_force = std::max(worst_force, std::abs(fm.m2[a][b] - pref * (F[a] * u[b] + u[a] * F[b])) / fscale);
        }
      }
    }
  }
  info("worst relative deviation: equilibrium " + fmt(worst_eq) + ", forcing " + fmt(worst_force));
  return worst_eq <= 1e-13 && worst_force <= 1e-13;
}

bool criterion4() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> numer(1, 9999);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool ok = true;
  double worst_fp = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const auto q = make_quadrature(d);
    Rational sum(0);
    for (int i = 0; i < q.points; ++i) sum = sum + q.exact_weight(i);
    ok = ok && sum.normalized() == Rational(1);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<Rational> vals(static_cast<std::size_t>(q.points));
      for (auto& v : vals) v = Rational(numer(rng), 10000);
      auto sample = [&](const IntVec& o) {
        for (int i = 0; i < q.points; ++i) {
          const IntVec& off = q.offsets[static_cast<std::size_t>(i)];
          if (off[0] == -o[0] && off[1] == -o[1] && off[2] == -o[2]) return vals[static_cast<std::size_t>(i)];
        }
        return Rational(0);
      };
      ok = ok && quadrature_weighted_sum<Rational>(q, sample).normalized() ==
                     quadrature_laplacian_form<Rational>(q, sample).normalized();
    }
    const Grid g(d, 8);
    ScalarField phi(g);
    for (std::size_t i = 0; i < g.cells(); ++i) phi[i] = unit(rng);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const IntVec c = g.coords(i);
      worst_fp = std::max(worst_fp, std::abs(quadrature_integral(phi, c, q) - quadrature_integral_laplacian_form(phi, c, q)));
    }
  }
  info("exact agreement in rational arithmetic: " + std::string(ok ? "yes" : "no") +
       "; floating-point difference " + fmt(worst_fp));
  return ok && worst_fp <= 1e-15;
}

bool criterion5() {
  bool ok = true;
  for (const std::string id : {"stat2d", "stat3d", "tran1d", "tran2d", "tran3d"}) {
    RunConfig cfg = base_config(id);
    cfg.n = default_resolutions(make_case(id)->dim()).front();
    Simulation sim(cfg);
    sim.initialize();
    const double m = sim.solver().total_mass();
    for (int s = 0; s < 1000; ++s) sim.advance();
    const double drift = std::abs(sim.solver().total_mass() - m) / m;
    info(id + " n=" + std::to_string(cfg.n) + ": relative mass drift over 1000 steps " + fmt(drift));
    ok = ok && drift <= 1e-10;
  }
  for (int d = 1; d <= 3; ++d) {
    for (double phi_value : {0.6, 1.0}) {
      const Grid g(d, 8);
      SchemeConfig cfg;
      cfg.quadrature_dims = d;
      Solver solver(g, cfg);
      const ScalarField phi(g, phi_value);
      initialize(solver.populations(), phi, VectorField(g));
      const std::vector<double> before(solver.populations().current().begin(), solver.populations().current().end());
      ScalarField cell_void(g);
      cell_void_integral(phi, cfg, NeighborTable(g), cell_void);
      for (int s = 0; s < 100; ++s) solver.step({&cell_void, nullptr, nullptr});
      const auto after = solver.populations().current();
      const bool fixed = std::equal(before.begin(), before.end(), after.begin(), after.end());
      if (!fixed) info("uniform state not fixed: d=" + std::to_string(d) + " phi=" + fmt(phi_value));
      ok = ok && fixed;
    }
  }
  info("uniform equilibrium states checked for bitwise invariance over 100 steps");
  return ok;
}

bool criterion6() {
  bool ok = true;
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, d == 3 ? 8 : 16);
    SchemeConfig cfg;
    cfg.tau = 0.53;
    cfg.quadrature_dims = d;
    std::mt19937_64 rng(5 + static_cast<std::uint64_t>(d));
    std::uniform_real_distribution<double> small(-1e-3, 1e-3);
    ScalarField ones(g, 1.0);
    ScalarField cell_void(g);
    cell_void_integral(ones, cfg, NeighborTable(g), cell_void);
    VectorField grad(g);
    central_gradient(ones, 1.0, grad);
    VectorField force(g);
    VectorField u(g);
    ScalarField m0(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      m0[i] = 1.0 + small(rng);
      for (int a = 0; a < d; ++a) {
        u(a, i) = 10.0 * small(rng);
        force(a, i) = small(rng);
      }
    }
    Solver solver(g, cfg);
    fill_equilibrium(solver.populations(), m0, u);
    vanse_test::ReferenceLbm ref(g, cfg.tau);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      for (int i = 0; i < ref.lat.q; ++i) ref.at(c, i) = solver.populations().at(i, c);
    }
    int first_mismatch = -1;
    for (int s = 0; s < 200 && first_mismatch < 0; ++s) {
      solver.step({&cell_void, &grad, &force});
      ref.step(cell_void, grad, force);
      for (std::size_t c = 0; c < g.cells() && first_mismatch < 0; ++c) {
        for (int i = 0; i < ref.lat.q; ++i) {
          if (solver.populations().at(i, c) != ref.at(c, i)) first_mismatch = s;
        }
      }
    }
    info("d=" + std::to_string(d) + ": unit void fraction vs reference BGK+Guo over 200 steps: " +
         (first_mismatch < 0 ? "bitwise identical" : "differs at step " + std::to_string(first_mismatch)));
    ok = ok && first_mismatch < 0;
  }
  for (double tau : {0.53, 0.8}) {
    const double nu = (tau - 0.5) / 3.0;
    const double measured = vanse_test::taylor_green_viscosity(64, tau);
    const double rel = std::abs(measured - nu) / nu;
    info("Taylor-Green n=64 tau=" + fmt(tau) + ": nu " + fmt(measured, 6) + " vs " + fmt(nu, 6) +
         " (relative error " + fmt(rel) + ")");
    ok = ok && rel <= 0.01;
  }
  return ok;
}

bool criterion7() {
  const ConvergenceTable& t = table_for("tran2d");
  const ErrorReport* consistent = nullptr;
  for (const auto& r : t.reports()) {
    if (r.n == 64) consistent = &r;
  }
  RunConfig cfg = base_config("tran2d");
  cfg.n = 64;
  ErrorReport own;
  if (!consistent) {
    own = run_single(cfg);
    consistent = &own;
  }
  cfg.variant = SchemeVariant::legacy;
  const ErrorReport legacy = run_single(cfg);
  info("tran2d n=64 pressure L2: consistent " + fmt(consistent->pressure.l2, 6) + ", legacy " +
       fmt(legacy.pressure.l2, 6));
  return legacy.pressure.l2 > consistent->pressure.l2;
}

bool criterion8() {
  const int procs = omp_get_num_procs();
  const int restore = omp_get_max_threads();
  bool ok = true;
  struct Job {
    std::string id;
    int n;
    double time;
  };
  for (const Job& job : {Job{"tran2d", 32, 0.05}, Job{"stat3d", 8, 0.5}}) {
    std::string reference;
    for (int workers : {1, 4, procs}) {
      const fs::path dir = fs::temp_directory_path() / ("vanse_acceptance_w" + std::to_string(workers));
      fs::remove_all(dir);
      RunConfig cfg = base_config(job.id);
      cfg.n = job.n;
      cfg.eval_time = job.time;
      cfg.max_time = job.time;
      cfg.workers = workers;
      cfg.out_dir = dir.string();
      run_single(cfg);
      std::ifstream in(dir / "errors.csv");
      std::stringstream ss;
      ss << in.rdbuf();
      if (reference.empty()) reference = ss.str();
      const bool same = ss.str() == reference;
      ok = ok && same && !reference.empty();
      fs::remove_all(dir);
    }
    info(job.id + " n=" + std::to_string(job.n) + ": errors.csv compared for workers 1, 4, " + std::to_string(procs));
  }
  omp_set_num_threads(restore);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
      {"convergence order of stat2d, tran1d, tran2d in [1.8, 2.2]", criterion1},
      {"stat3d L2 convergence order >= 1.7", criterion2},
      {"equilibrium and forcing moment identities", criterion3},
      {"quadrature identity and weight sums", criterion4},
      {"mass conservation and uniform fixed point", criterion5},
      {"reduction to BGK+Guo and Taylor-Green viscosity", criterion6},
      {"legacy pressure error exceeds consistent on tran2d n=64", criterion7},
      {"errors.csv independent of worker count", criterion8},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    bool pass = false;
    try {
      pass = criteria[k].second();
    } catch (const std::exception& e) {
      info(std::string("exception: ") + e.what());
    }
    std::cout << "CRITERION " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << criteria[k].first << '\n'
              << std::flush;
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
