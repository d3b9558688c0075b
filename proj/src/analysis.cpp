#include "vanse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "vanse/errors.hpp"

namespace vanse {

Norms norms_of_deviations(const std::vector<double>& deviations) {
  Norms n;
  if (deviations.empty()) return n;
  double sum = 0.0;
  double sq = 0.0;
  for (double d : deviations) {
    sum += d;
    sq += d * d;
    n.linf = std::max(n.linf, d);
  }
  const auto count = static_cast<double>(deviations.size());
  n.l1 = sum / count;
  n.l2 = std::sqrt(sq / count);
  return n;
}

Norms error_norms(const ScalarField& sim, const ScalarField& exact) {
  if (!(sim.grid() == exact.grid())) throw UsageError("error_norms: field shapes differ");
  std::vector<double> dev(sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) dev[i] = std::abs(sim[i] - exact[i]);
  return norms_of_deviations(dev);
}

Norms error_norms(const VectorField& sim, const VectorField& exact) {
  if (!(sim.grid() == exact.grid())) throw UsageError("error_norms: field shapes differ");
  const int d = sim.grid().dim();
  std::vector<double> dev(sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      const double e = sim(a, i) - exact(a, i);
      s += e * e;
    }
    dev[i] = std::sqrt(s);
  }
  return norms_of_deviations(dev);
}

double eoc(double e_coarse, double e_fine, double ratio) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !(ratio > 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

bool steady_detector(const std::vector<std::vector<double>>& history, std::size_t window, double tol) {
  if (window < 2 || history.empty()) return false;
  for (const auto& series : history) {
    if (series.size() < window) return false;
    const double last = series.back();
    const double scale = std::abs(last);
    for (std::size_t k = series.size() - window; k < series.size(); ++k) {
      const double change = std::abs(series[k] - last);
      if (!std::isfinite(series[k])) return false;
      if (scale == 0.0 ? change != 0.0 : change > tol * scale) return false;
    }
  }
  return true;
}

UnitConverter make_converter(int n, double tau, double nu, double length, double rho) {
  if (n < 4) throw ConfigError("resolution must be at least 4");
  if (!(tau > 0.5)) throw ConfigError("relaxation time must exceed 1/2, got " + std::to_string(tau));
  if (!(nu > 0.0) || !(length > 0.0) || !(rho > 0.0)) {
    throw ConfigError("viscosity, domain length and density must be positive");
  }
  UnitConverter u;
  u.dx = length / n;
  u.tau = tau;
  u.nu = nu;
  u.rho = rho;
  u.dt = (tau - 0.5) / 3.0 * u.dx * u.dx / nu;
  return u;
}

double norm_value(const ErrorReport& r, const std::string& quantity, const std::string& norm) {
  const Norms* n = nullptr;
  if (quantity == "velocity") {
    n = &r.velocity;
  } else if (quantity == "pressure") {
    n = &r.pressure;
  } else {
    throw UsageError("unknown quantity '" + quantity + "'");
  }
  if (norm == "L1") return n->l1;
  if (norm == "L2") return n->l2;
  if (norm == "Linf") return n->linf;
  throw UsageError("unknown norm '" + norm + "'");
}

void ConvergenceTable::add(const ErrorReport& r) {
  if (!reports_.empty() && r.n <= reports_.back().n) {
    throw UsageError("resolutions must strictly increase");
  }
  reports_.push_back(r);
}

double ConvergenceTable::eoc_at(std::size_t i, const std::string& quantity, const std::string& norm) const {
  if (i == 0 || i >= reports_.size()) return std::numeric_limits<double>::quiet_NaN();
  const ErrorReport& c = reports_[i - 1];
  const ErrorReport& f = reports_[i];
  return eoc(norm_value(c, quantity, norm), norm_value(f, quantity, norm),
             static_cast<double>(f.n) / static_cast<double>(c.n));
}

double ConvergenceTable::mean_eoc(const std::string& quantity, const std::string& norm) const {
  if (reports_.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t i = 1; i < reports_.size(); ++i) sum += eoc_at(i, quantity, norm);
  return sum / static_cast<double>(reports_.size() - 1);
}

namespace {

const char* const kQuantities[] = {"velocity", "pressure"};
const char* const kNorms[] = {"L1", "L2", "Linf"};

void csv_header(std::ostream& os) { os << "case,n,quantity,norm,value,eoc\n"; }

void csv_value(std::ostream& os, double v) {
  if (std::isnan(v)) return;
  os << std::setprecision(17) << v;
}

}  // namespace

void write_errors_csv(const ErrorReport& r, std::ostream& os) {
  csv_header(os);
  for (const char* q : kQuantities) {
    for (const char* nm : kNorms) {
      os << r.case_id << ',' << r.n << ',' << q << ',' << nm << ',';
      csv_value(os, norm_value(r, q, nm));
      os << ",\n";
    }
  }
}

void ConvergenceTable::write_csv(std::ostream& os) const {
  csv_header(os);
  for (std::size_t i = 0; i < reports_.size(); ++i) {
    const ErrorReport& r = reports_[i];
    for (const char* q : kQuantities) {
      for (const char* nm : kNorms) {
        os << r.case_id << ',' << r.n << ',' << q << ',' << nm << ',';
        csv_value(os, norm_value(r, q, nm));
        os << ',';
        csv_value(os, eoc_at(i, q, nm));
        os << '\n';
      }
    }
  }
}

void ConvergenceTable::print(std::ostream& os) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::left << std::setw(10) << "quantity" << std::setw(6) << "norm";
  for (const ErrorReport& r : reports_) os << std::right << std::setw(14) << ("n=" + std::to_string(r.n));
  os << std::right << std::setw(10) << "mean EOC" << '\n';
  for (const char* q : kQuantities) {
    for (const char* nm : kNorms) {
      os << std::left << std::setw(10) << q << std::setw(6) << nm << std::right;
      for (const ErrorReport& r : reports_) {
        os << std::setw(14) << std::scientific << std::setprecision(4) << norm_value(r, q, nm);
      }
      os << std::setw(10) << std::fixed << std::setprecision(3) << mean_eoc(q, nm) << '\n';
    }
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace vanse
