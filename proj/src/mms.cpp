#include "vanse/mms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vanse/errors.hpp"

namespace vanse {

void ManufacturedCase::sample(const Grid& g, double dx, double t, FieldSample& out) const {
  for (std::size_t cell = 0; cell < g.cells(); ++cell) {
    const IntVec c = g.coords(cell);
    const Vec3 x{c[0] * dx, c[1] * dx, c[2] * dx};
    const FieldValues v = evaluate(x, t);
    out.phi[cell] = v.phi;
    out.u.set(cell, v.u);
    out.p[cell] = v.p;
  }
}

namespace {

constexpr double kPi = std::numbers::pi;

// sin and cos of pi * s with s reduced to [0, 2), so that periodic images of
// dyadic coordinates give identical bits.
struct Trig {
  double s;
  double c;
};

Trig trig(double s) {
  double r = std::fmod(s, 2.0);
  if (r < 0.0) r += 2.0;
  return {std::sin(kPi * r), std::cos(kPi * r)};
}

/// Base for the sinusoidal cases: per-axis sin/cos of pi (x_a - shift(t)),
/// combined by Derived::combine. evaluate and sample share the formula, so
/// both paths produce the same bits.
template <class Derived>
class SeparableCase : public ManufacturedCase {
 public:
  FieldValues evaluate(const Vec3& x, double t) const override {
    std::array<Trig, 3> tr{};
    const double sh = self().shift(t);
    for (int a = 0; a < dim(); ++a) tr[a] = trig(x[a] - sh);
    return self().combine(tr);
  }

  void sample(const Grid& g, double dx, double t, FieldSample& out) const override {
    const int n = g.n();
    const double sh = self().shift(t);
    std::vector<Trig> table(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) table[static_cast<std::size_t>(i)] = trig(i * dx - sh);
    const int ny = dim() > 1 ? n : 1;
    const int nz = dim() > 2 ? n : 1;
    double* phi = out.phi.span().data();
    double* p = out.p.span().data();
    std::array<double*, 3> u{out.u.component(0).data(), out.u.component(1).data(), out.u.component(2).data()};
    std::size_t cell = 0;
    std::array<Trig, 3> tr{};
    for (int z = 0; z < nz; ++z) {
      if (dim() > 2) tr[2] = table[static_cast<std::size_t>(z)];
      for (int y = 0; y < ny; ++y) {
        if (dim() > 1) tr[1] = table[static_cast<std::size_t>(y)];
        for (int x = 0; x < n; ++x, ++cell) {
          tr[0] = table[static_cast<std::size_t>(x)];
          const FieldValues v = self().combine(tr);
          phi[cell] = v.phi;
          u[0][cell] = v.u[0];
          u[1][cell] = v.u[1];
          u[2][cell] = v.u[2];
          p[cell] = v.p;
        }
      }
    }
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

class Stationary2D final : public SeparableCase<Stationary2D> {
 public:
  std::string name() const override { return "stat2d"; }
  int dim() const override { return 2; }
  bool transient() const override { return false; }
  int variation_dims() const override { return 2; }

  double shift(double) const { return 0.0; }
  FieldValues combine(const std::array<Trig, 3>& t) const {
    const double sx = t[0].s, cx = t[0].c, sy = t[1].s, cy = t[1].c;
    FieldValues v;
    v.phi = 0.5 + 0.4 * sx * sy;
    v.u = {2.0 * (-(sx * sx) * sy * cy), 2.0 * (sy * sy * sx * cx), 0.0};
    v.p = sx * sy;
    return v;
  }
};

class Stationary3D final : public SeparableCase<Stationary3D> {
 public:
  std::string name() const override { return "stat3d"; }
  int dim() const override { return 3; }
  bool transient() const override { return false; }
  int variation_dims() const override { return 3; }

  double shift(double) const { return 0.0; }
  FieldValues combine(const std::array<Trig, 3>& t) const {
    const double sx = t[0].s, cx = t[0].c, sy = t[1].s, cy = t[1].c, sz = t[2].s, cz = t[2].c;
    FieldValues v;
    v.phi = 0.5 + 0.4 * sx * sy * sz;
    v.u = {sx * sx * sy * cy * sz * cz, sy * sy * sx * cx * sz * cz, -2.0 * (sz * sz) * sx * cx * sy * cy};
    v.p = sx * sy * sz;
    return v;
  }
};

/// Traveling wave in d dimensions: phi = 0.5 + 0.4 prod sin(pi (x_a - 0.5 t)),
/// u_a = 0.5 + 1/phi, p = prod sin(pi (x_a - 0.5 t)). With wave speed 0.5 in
/// every axis, phi * u_a = 0.5 phi + 1 keeps the continuity residual zero.
class TravelingWave final : public SeparableCase<TravelingWave> {
 public:
  TravelingWave(int dim, bool moving) : dim_(dim), moving_(moving) {}

  std::string name() const override {
    if (dim_ == 1) return "tran1d";
    if (dim_ == 2) return "tran2d";
    return "tran3d";
  }
  int dim() const override { return dim_; }
  bool transient() const override { return true; }
  int variation_dims() const override { return dim_; }
  double period() const override { return moving_ ? 4.0 : 0.0; }

  double shift(double t) const { return moving_ ? 0.5 * t : 0.0; }
  FieldValues combine(const std::array<Trig, 3>& t) const {
    double prod = t[0].s;
    for (int a = 1; a < dim_; ++a) prod *= t[a].s;
    FieldValues v;
    v.phi = 0.5 + 0.4 * prod;
    const double ua = 0.5 + 1.0 / v.phi;
    for (int a = 0; a < dim_; ++a) v.u[a] = ua;
    v.p = prod;
    return v;
  }

 private:
  int dim_;
  bool moving_;
};

class UniformCase final : public ManufacturedCase {
 public:
  UniformCase(int dim, double phi, const Vec3& u, double p) : dim_(dim) {
    if (dim < 1 || dim > 3) throw ConfigError("uniform case dimension must be 1, 2 or 3");
    if (!(phi > 0.0)) throw ConfigError("uniform void fraction must be positive");
    v_.phi = phi;
    for (int a = 0; a < dim; ++a) v_.u[a] = u[a];
    v_.p = p;
  }
  std::string name() const override { return "uniform"; }
  int dim() const override { return dim_; }
  bool transient() const override { return false; }
  int variation_dims() const override { return 1; }
  FieldValues evaluate(const Vec3&, double) const override { return v_; }

 private:
  int dim_;
  FieldValues v_;
};

}  // namespace

std::vector<std::string> builtin_case_ids() { return {"stat2d", "stat3d", "tran1d", "tran2d", "tran3d", "uniform"}; }

std::unique_ptr<ManufacturedCase> make_case(const std::string& id, const CaseOptions& options) {
  if (id == "stat2d") return std::make_unique<Stationary2D>();
  if (id == "stat3d") return std::make_unique<Stationary3D>();
  if (id == "tran1d") return std::make_unique<TravelingWave>(1, true);
  if (id == "tran2d") return std::make_unique<TravelingWave>(2, true);
  if (id == "tran3d") return std::make_unique<TravelingWave>(3, !options.as_printed);
  if (id == "uniform") {
    return std::make_unique<UniformCase>(options.uniform_dim, options.uniform_phi, options.uniform_u,
                                         options.uniform_p);
  }
  if (id == "table") {
    if (options.table_path.empty()) throw UsageError("case 'table' needs a field table file");
    return TabulatedCase::load(options.table_path);
  }
  throw UsageError("unknown case '" + id + "' (expected stat2d|stat3d|tran1d|tran2d|tran3d|uniform|table)");
}

// --------------------------------------------------------------------------
// Tabulated fields

std::unique_ptr<TabulatedCase> TabulatedCase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field table '" + path + "'");
  std::stringstream tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    tokens << line << '\n';
  }

  auto table = std::unique_ptr<TabulatedCase>(new TabulatedCase());
  std::string key;
  bool have_n = false;
  while (tokens >> key) {
    if (key == "dim") {
      tokens >> table->dim_;
    } else if (key == "n") {
      tokens >> table->n_;
      have_n = true;
    } else if (key == "length") {
      tokens >> table->length_;
    } else if (key == "period") {
      tokens >> table->period_;
    } else if (key == "variation_dims") {
      tokens >> table->variation_dims_;
    } else if (key == "frame") {
      if (!have_n || table->n_ < 2) throw ConfigError(path + ": 'n' must precede the first frame");
      if (table->dim_ < 1 || table->dim_ > 3) throw ConfigError(path + ": dim must be 1, 2 or 3");
      Frame f;
      tokens >> f.time;
      std::size_t count = 1;
      for (int a = 0; a < table->dim_; ++a) count *= static_cast<std::size_t>(table->n_);
      f.nodes.resize(count);
      for (auto& v : f.nodes) {
        tokens >> v.phi;
        for (int a = 0; a < table->dim_; ++a) tokens >> v.u[a];
        tokens >> v.p;
        if (!(v.phi > 0.0)) throw ConfigError(path + ": void fraction must be positive");
      }
      table->frames_.push_back(std::move(f));
    } else {
      throw ConfigError(path + ": unexpected token '" + key + "'");
    }
    if (tokens.fail()) throw ConfigError(path + ": malformed value after '" + key + "'");
  }
  if (table->frames_.empty()) throw ConfigError(path + ": no frames");
  if (!(table->length_ > 0.0)) throw ConfigError(path + ": length must be positive");
  if (table->variation_dims_ < 1 || table->variation_dims_ > table->dim_) {
    throw ConfigError(path + ": variation_dims must be in 1..dim");
  }
  if (table->period_ <= 0.0 && table->frames_.size() != 1) {
    throw ConfigError(path + ": a stationary table (period 0) holds exactly one frame");
  }
  for (std::size_t i = 1; i < table->frames_.size(); ++i) {
    if (!(table->frames_[i].time > table->frames_[i - 1].time)) {
      throw ConfigError(path + ": frame times must increase");
    }
  }
  if (table->period_ > 0.0 && (table->frames_.front().time < 0.0 || table->frames_.back().time >= table->period_)) {
    throw ConfigError(path + ": frame times must lie in [0, period)");
  }
  return table;
}

FieldValues TabulatedCase::spatial(const Frame& f, const Vec3& x) const {
  const double h = length_ / n_;
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    double s = std::fmod(x[a] / h, static_cast<double>(n_));
    if (s < 0.0) s += n_;
    const double fl = std::floor(s);
    i0[a] = static_cast<int>(fl) % n_;
    w[a] = s - fl;
  }
  FieldValues out;
  out.phi = 0.0;
  const int corners = 1 << dim_;
  for (int k = 0; k < corners; ++k) {
    double weight = 1.0;
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (int a = 0; a < dim_; ++a) {
      const int bit = (k >> a) & 1;
      weight *= bit ? w[a] : 1.0 - w[a];
      idx += stride * static_cast<std::size_t>((i0[a] + bit) % n_);
      stride *= static_cast<std::size_t>(n_);
    }
    const FieldValues& v = f.nodes[idx];
    out.phi += weight * v.phi;
    for (int a = 0; a < dim_; ++a) out.u[a] += weight * v.u[a];
    out.p += weight * v.p;
  }
  return out;
}

FieldValues TabulatedCase::evaluate(const Vec3& x, double t) const {
  if (frames_.size() == 1) return spatial(frames_.front(), x);
  double tt = std::fmod(t, period_);
  if (tt < 0.0) tt += period_;
  // Find the bracketing frames, wrapping from the last frame to the first.
  std::size_t hi = 0;
  while (hi < frames_.size() && frames_[hi].time <= tt) ++hi;
  const std::size_t lo = hi == 0 ? frames_.size() - 1 : hi - 1;
  if (hi == frames_.size()) hi = 0;
  double t_lo = frames_[lo].time;
  double t_hi = frames_[hi].time;
  if (t_hi <= t_lo) t_hi += period_;
  if (tt < t_lo) tt += period_;
  const double w = (tt - t_lo) / (t_hi - t_lo);
  const FieldValues a = spatial(frames_[lo], x);
  const FieldValues b = spatial(frames_[hi], x);
  FieldValues out;
  out.phi = (1.0 - w) * a.phi + w * b.phi;
  for (int k = 0; k < 3; ++k) out.u[k] = (1.0 - w) * a.u[k] + w * b.u[k];
  out.p = (1.0 - w) * a.p + w * b.p;
  return out;
}

// --------------------------------------------------------------------------
// Residual stencils

namespace {

/// Central difference given the reciprocal of twice the spacing.
inline double centered(double plus, double minus, double inv_2h) { return (plus - minus) * inv_2h; }

/// Viscous stress phi rho (d_b u_a + d_a u_b) from centred velocity derivatives.
inline double stress(double phirho, double dua_db, double dub_da) { return phirho * (dua_db + dub_da); }

/// Momentum residual from its ingredients; shared by the pointwise and grid paths.
/// dflux[a] = sum_b d_b(phi rho u_a u_b), dstress[a] = sum_b d_b S_ab.
inline double momentum_component(double dmom_dt, double dflux, double phi, double dp, double nu, double dstress) {
  return dmom_dt + dflux + phi * dp - nu * dstress;
}

IntVec unit(int a, int s) {
  IntVec o{0, 0, 0};
  o[a] = s;
  return o;
}

IntVec add(IntVec a, const IntVec& b) {
  for (int k = 0; k < 3; ++k) a[k] += b[k];
  return a;
}

}  // namespace

Vec3 mms_force(const ManufacturedCase& c, const Vec3& x, double t, double hx, double ht, const FluidProperties& fluid) {
  const int d = c.dim();
  auto at = [&](const IntVec& o, int k) {
    Vec3 p = x;
    for (int a = 0; a < d; ++a) p[a] = x[a] + o[a] * hx;
    return c.evaluate(p, t + k * ht);
  };
  const double rho = fluid.rho;
  const double inv_x = 1.0 / (2.0 * hx);
  const double inv_t = 1.0 / (2.0 * ht);
  const FieldValues center = at({0, 0, 0}, 0);
  const FieldValues before = at({0, 0, 0}, -1);
  const FieldValues after = at({0, 0, 0}, 1);

  auto stress_at = [&](const IntVec& o, int a, int b) {
    const FieldValues v = at(o, 0);
    const FieldValues pb = at(add(o, unit(b, 1)), 0), mb = at(add(o, unit(b, -1)), 0);
    const FieldValues pa = at(add(o, unit(a, 1)), 0), ma = at(add(o, unit(a, -1)), 0);
    return stress(v.phi * rho, centered(pb.u[a], mb.u[a], inv_x), centered(pa.u[b], ma.u[b], inv_x));
  };

  Vec3 f{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const double dmom = centered(after.phi * rho * after.u[a], before.phi * rho * before.u[a], inv_t);
    double dflux = 0.0;
    double dstress = 0.0;
    for (int b = 0; b < d; ++b) {
      const FieldValues p = at(unit(b, 1), 0), m = at(unit(b, -1), 0);
      dflux += centered(p.phi * rho * p.u[a] * p.u[b], m.phi * rho * m.u[a] * m.u[b], inv_x);
      dstress += centered(stress_at(unit(b, 1), a, b), stress_at(unit(b, -1), a, b), inv_x);
    }
    const FieldValues pa = at(unit(a, 1), 0), ma = at(unit(a, -1), 0);
    f[a] = momentum_component(dmom, dflux, center.phi, centered(pa.p, ma.p, inv_x), fluid.nu, dstress);
  }
  return f;
}

double mass_residual(const ManufacturedCase& c, const Vec3& x, double t, double hx, double ht,
                     const FluidProperties& fluid) {
  const int d = c.dim();
  auto at = [&](int axis, int s, int k) {
    Vec3 p = x;
    if (axis >= 0) p[axis] += s * hx;
    return c.evaluate(p, t + k * ht);
  };
  const double rho = fluid.rho;
  const double inv_x = 1.0 / (2.0 * hx);
  const double inv_t = 1.0 / (2.0 * ht);
  double r = centered(at(-1, 0, 1).phi * rho, at(-1, 0, -1).phi * rho, inv_t);
  for (int a = 0; a < d; ++a) {
    const FieldValues p = at(a, 1, 0), m = at(a, -1, 0);
    r += centered(p.phi * rho * p.u[a], m.phi * rho * m.u[a], inv_x);
  }
  return r;
}

// --------------------------------------------------------------------------
// Grid assembly

MmsForceAssembler::MmsForceAssembler(const ManufacturedCase& c, const Grid& g, double dx, double dt,
                                     const FluidProperties& fluid)
    : case_(c), grid_(g), nb_(g), dx_(dx), dt_(dt), fluid_(fluid) {
  if (c.dim() != g.dim()) throw UsageError("case dimension does not match the grid");
  if (!(dx > 0.0) || !(dt > 0.0)) throw UsageError("finite-difference spacings must be positive");
  for (auto& l : levels_) l = std::make_unique<FieldSample>(g);
  for (auto& s : stress_) s.assign(g.cells(), 0.0);
}

void MmsForceAssembler::ensure_levels(double t) {
  const double tol = 1e-9 * dt_;
  if (have_levels_ && std::abs(t - level_time_) <= tol) return;
  if (have_levels_ && std::abs(t - (level_time_ + dt_)) <= tol) {
    std::rotate(levels_.begin(), levels_.begin() + 1, levels_.end());
    case_.sample(grid_, dx_, t + dt_, level(1));
  } else {
    case_.sample(grid_, dx_, t - dt_, level(-1));
    case_.sample(grid_, dx_, t, level(0));
    case_.sample(grid_, dx_, t + dt_, level(1));
  }
  have_levels_ = true;
  level_time_ = t;
}

namespace {

/// Grid form of mms_force for a D-dimensional grid. Same expressions as the
/// pointwise path, swept row by row so the interior loops vectorize.
template <int D>
void assemble_force(const Grid& g, double dx, double dt, const FluidProperties& fluid, const FieldSample& before,
                    const FieldSample& now, const FieldSample& after, std::array<std::vector<double>, 9>& stress_buf,
                    VectorField& out) {
  const auto n = static_cast<std::size_t>(g.n());
  const double rho = fluid.rho;
  const double nu = fluid.nu;
  const double inv_x = 1.0 / (2.0 * dx);
  const double inv_t = 1.0 / (2.0 * dt);
  const double* phi = now.phi.span().data();
  const double* p = now.p.span().data();
  std::array<const double*, 3> u{};
  std::array<const double*, 3> u_before{};
  std::array<const double*, 3> u_after{};
  std::array<double*, 3> f{};
  for (int a = 0; a < 3; ++a) {
    u[a] = now.u.component(a).data();
    u_before[a] = before.u.component(a).data();
    u_after[a] = after.u.component(a).data();
    f[a] = out.component(a).data();
  }
  const double* phi_before = before.phi.span().data();
  const double* phi_after = after.phi.span().data();

  std::array<double*, 9> s{};
  for (int k = 0; k < 9; ++k) s[k] = stress_buf[static_cast<std::size_t>(k)].data();

  // Stresses first: the divergence needs them at the neighbours.
  detail::for_each_row(g, [&](const detail::RowNeighbors& r) {
    detail::static_for<D>([&](auto a) {
      detail::static_for<D>([&](auto b) {
        const double* __restrict ua = u[a];
        const double* __restrict ub = u[b];
        const double* __restrict ph = phi;
        double* __restrict sab = s[3 * a + b];
        detail::for_each_x(n, [=](std::size_t x, std::size_t xm, std::size_t xp) {
          const double dua_db = centered(ua[r.at<b, 1>(x, xm, xp)], ua[r.at<b, -1>(x, xm, xp)], inv_x);
          const double dub_da = centered(ub[r.at<a, 1>(x, xm, xp)], ub[r.at<a, -1>(x, xm, xp)], inv_x);
          sab[r.base + x] = stress(ph[r.base + x] * rho, dua_db, dub_da);
        });
      });
    });
  });

  detail::for_each_row(g, [&](const detail::RowNeighbors& r) {
    detail::static_for<D>([&](auto a) {
      const double* __restrict ph = phi;
      const double* __restrict pr = p;
      const double* __restrict ph_b = phi_before;
      const double* __restrict ph_a = phi_after;
      const double* __restrict ua = u[a];
      const double* __restrict ua_b = u_before[a];
      const double* __restrict ua_a = u_after[a];
      const double* __restrict u0 = u[0];
      const double* __restrict u1 = u[D > 1 ? 1 : 0];
      const double* __restrict u2 = u[D > 2 ? 2 : 0];
      const double* __restrict sa0 = s[3 * a];
      const double* __restrict sa1 = s[3 * a + (D > 1 ? 1 : 0)];
      const double* __restrict sa2 = s[3 * a + (D > 2 ? 2 : 0)];
      double* __restrict fa = f[a];
      detail::for_each_x(n, [=](std::size_t x, std::size_t xm, std::size_t xp) {
        const std::size_t i = r.base + x;
        const double dmom = centered(ph_a[i] * rho * ua_a[i], ph_b[i] * rho * ua_b[i], inv_t);
        double dflux = 0.0;
        double dstress = 0.0;
        detail::static_for<D>([&](auto b) {
          const double* __restrict ubb = b == 0 ? u0 : (b == 1 ? u1 : u2);
          const double* __restrict sab = b == 0 ? sa0 : (b == 1 ? sa1 : sa2);
          const std::size_t ip = r.at<b, 1>(x, xm, xp);
          const std::size_t im = r.at<b, -1>(x, xm, xp);
          dflux += centered(ph[ip] * rho * ua[ip] * ubb[ip], ph[im] * rho * ua[im] * ubb[im], inv_x);
          dstress += centered(sab[ip], sab[im], inv_x);
        });
        const double dp = centered(pr[r.at<a, 1>(x, xm, xp)], pr[r.at<a, -1>(x, xm, xp)], inv_x);
        fa[i] = momentum_component(dmom, dflux, ph[i], dp, nu, dstress);
      });
    });
  });
}

}  // namespace

void MmsForceAssembler::assemble(double t, VectorField& out) {
  if (!(out.grid() == grid_)) throw UsageError("force field grid mismatch");
  ensure_levels(t);
  switch (grid_.dim()) {
    case 1:
      assemble_force<1>(grid_, dx_, dt_, fluid_, level(-1), level(0), level(1), stress_, out);
      break;
    case 2:
      assemble_force<2>(grid_, dx_, dt_, fluid_, level(-1), level(0), level(1), stress_, out);
      break;
    default:
      assemble_force<3>(grid_, dx_, dt_, fluid_, level(-1), level(0), level(1), stress_, out);
      break;
  }
}

}  // namespace vanse
