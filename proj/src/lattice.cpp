#include "vanse/lattice.hpp"

#include <numeric>

#include "vanse/errors.hpp"

namespace vanse {

Rational Rational::normalized() const {
  if (den == 0) throw ConfigError("rational with zero denominator");
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  Rational r{num / g, den / g};
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  return r;
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t l = std::lcm(a.den, b.den);
  return Rational{a.num * (l / a.den) + b.num * (l / b.den), l}.normalized();
}

Rational operator-(Rational a, Rational b) { return a + Rational{-b.num, b.den}; }

Rational operator*(Rational a, Rational b) {
  a = a.normalized();
  b = b.normalized();
  const std::int64_t g1 = std::gcd(a.num, b.den) == 0 ? 1 : std::gcd(a.num, b.den);
  const std::int64_t g2 = std::gcd(b.num, a.den) == 0 ? 1 : std::gcd(b.num, a.den);
  return Rational{(a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1)}.normalized();
}

Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw ConfigError("rational division by zero");
  return a * Rational{b.den, b.num};
}

bool operator==(Rational a, Rational b) {
  a = a.normalized();
  b = b.normalized();
  return a.num == b.num && a.den == b.den;
}

namespace {

template <int D>
LatticeDescriptor build_lattice(std::string name, const std::vector<Rational>& class_weights) {
  using S = stencil::Flow<D>;
  LatticeDescriptor lat;
  lat.name = std::move(name);
  lat.dim = D;
  lat.q = S::q;
  for (int i = 0; i < S::q; ++i) {
    const IntVec& c = S::c[i];
    lat.velocities.push_back(c);
    // Weight class is the number of non-zero components.
    const int nonzero = (c[0] != 0) + (c[1] != 0) + (c[2] != 0);
    lat.exact_weights.push_back(class_weights[nonzero]);
    lat.weights.push_back(S::w[i]);
  }
  lat.opposite.resize(S::q);
  for (int i = 0; i < S::q; ++i) {
    for (int j = 0; j < S::q; ++j) {
      const IntVec& a = S::c[i];
      const IntVec& b = S::c[j];
      if (a[0] == -b[0] && a[1] == -b[1] && a[2] == -b[2]) lat.opposite[i] = j;
    }
  }
  return lat;
}

}  // namespace

LatticeDescriptor make_lattice(int dim) {
  switch (dim) {
    case 1:
      return build_lattice<1>("D1Q3", {Rational{2, 3}, Rational{1, 6}});
    case 2:
      return build_lattice<2>("D2Q9", {Rational{4, 9}, Rational{1, 9}, Rational{1, 36}});
    case 3:
      return build_lattice<3>("D3Q27",
                              {Rational{8, 27}, Rational{2, 27}, Rational{1, 54}, Rational{1, 216}});
    default:
      throw ConfigError("unsupported lattice dimension " + std::to_string(dim));
  }
}

QuadratureDescriptor make_quadrature(int variation_dims) {
  QuadratureDescriptor q;
  switch (variation_dims) {
    case 1:
      q.exact_center = Rational{1, 2};
      q.exact_off_center = Rational{1, 4};
      break;
    case 2:
      q.exact_center = Rational{1, 3};
      q.exact_off_center = Rational{1, 6};
      break;
    case 3:
      q.exact_center = Rational{1, 6};
      q.exact_off_center = Rational{5, 36};
      break;
    default:
      throw ConfigError("unsupported quadrature variation dimension count " +
                        std::to_string(variation_dims));
  }
  q.dim = variation_dims;
  q.points = 2 * variation_dims + 1;
  q.center_weight = q.exact_center.value();
  q.off_center_weight = q.exact_off_center.value();
  q.offsets.push_back({0, 0, 0});
  for (int a = 0; a < variation_dims; ++a) {
    IntVec plus{0, 0, 0};
    IntVec minus{0, 0, 0};
    plus[a] = 1;
    minus[a] = -1;
    q.offsets.push_back(plus);
    q.offsets.push_back(minus);
  }
  return q;
}

}  // namespace vanse
