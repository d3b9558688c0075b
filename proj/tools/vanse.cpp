// Command line driver: single runs and convergence studies of the
// manufactured-solution cases.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vanse/errors.hpp"
#include "vanse/simulation.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kBreakdown = 2 };

struct Options {
  vanse::RunConfig cfg;
  std::string scheme = "consistent";
  std::string init = "consistent";
  std::string resolutions;
  double tau = 0.0;
  bool quiet = false;
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--case", o.cfg.case_id, "stat2d|stat3d|tran1d|tran2d|tran3d|uniform|table")->required();
  cmd.add_option("--tau", o.tau, "relaxation time (default: 0.53 stationary, 0.5075 transient)");
  cmd.add_option("--scheme", o.scheme, "consistent|legacy")->check(CLI::IsMember({"consistent", "legacy"}));
  cmd.add_flag("--as-printed", o.cfg.case_options.as_printed, "tran3d with time-independent fields");
  cmd.add_option("--out", o.cfg.out_dir, "output directory");
  cmd.add_option("--snapshots", o.cfg.snapshot_every, "write snapshots every k steps");
  cmd.add_option("--workers", o.cfg.workers, "worker threads (0: runtime default)");
  cmd.add_option("--init", o.init, "population seed: consistent|local")->check(CLI::IsMember({"consistent", "local"}));
  cmd.add_option("--quadrature-dims", o.cfg.quadrature_dims, "void fraction quadrature stencil (0: case default)");
  cmd.add_option("--eval-time", o.cfg.eval_time, "transient evaluation time in s");
  cmd.add_option("--max-periods", o.cfg.max_periods, "extra transient periods while norms still change");
  cmd.add_option("--period-tol", o.cfg.period_tol, "relative norm change that ends period monitoring");
  cmd.add_option("--max-time", o.cfg.max_time, "stationary time cap in s");
  cmd.add_option("--steady-window", o.cfg.steady_window, "steps between steadiness checks");
  cmd.add_option("--steady-tol", o.cfg.steady_tol, "relative steadiness tolerance");
  cmd.add_option("--log-every", o.cfg.log_every, "steps between progress lines (0: off)");
  cmd.add_option("--nu", o.cfg.nu, "kinematic viscosity in m^2/s");
  cmd.add_option("--table", o.cfg.case_options.table_path, "field table for --case table");
  cmd.add_flag("--quiet", o.quiet, "suppress progress output");
}

void finalize(Options& o) {
  o.cfg.variant = vanse::parse_scheme_variant(o.scheme);
  o.cfg.init = vanse::parse_init_mode(o.init);
  if (o.tau != 0.0) o.cfg.tau = o.tau;
}

std::vector<int> parse_resolutions(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw vanse::UsageError("bad resolution '" + item + "'");
    }
  }
  return out;
}

void print_report(const vanse::ErrorReport& r) {
  std::cout << r.case_id << " n=" << r.n << " t=" << r.time << " s (" << r.steps << " steps)\n";
  std::cout.precision(6);
  std::cout << "  velocity  L1=" << r.velocity.l1 << "  L2=" << r.velocity.l2 << "  Linf=" << r.velocity.linf
            << '\n';
  std::cout << "  pressure  L1=" << r.pressure.l1 << "  L2=" << r.pressure.l2 << "  Linf=" << r.pressure.linf
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice Boltzmann solver for the volume averaged Navier-Stokes equations"};
  app.set_config("--config", "", "TOML/INI file with option defaults; give it before the subcommand");
  app.require_subcommand(1);

  Options run_opts;
  CLI::App* run = app.add_subcommand("run", "simulate one case at one resolution");
  add_common(*run, run_opts);
  run->add_option("--n", run_opts.cfg.n, "cells per direction")->required();

  Options conv_opts;
  CLI::App* converge = app.add_subcommand("converge", "grid convergence study");
  add_common(*converge, conv_opts);
  converge->add_option("--resolutions", conv_opts.resolutions, "comma separated, e.g. 16,32,64,128");
  converge->add_flag("--parallel-runs", conv_opts.cfg.parallel_runs, "run all resolutions concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      finalize(run_opts);
      std::ostream* log = run_opts.quiet ? nullptr : &std::cerr;
      print_report(vanse::run_single(run_opts.cfg, log));
    } else {
      finalize(conv_opts);
      vanse::RunConfig& cfg = conv_opts.cfg;
      if (conv_opts.resolutions.empty()) {
        cfg.resolutions = vanse::default_resolutions(vanse::make_case(cfg.case_id, cfg.case_options)->dim());
      } else {
        cfg.resolutions = parse_resolutions(conv_opts.resolutions);
      }
      std::ostream* log = conv_opts.quiet ? nullptr : &std::cerr;
      const vanse::ConvergenceTable table = vanse::run_convergence(cfg, log);
      table.print(std::cout);
    }
  } catch (const vanse::NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return kBreakdown;
  } catch (const vanse::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const vanse::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
