#include <doctest.h>

#include <cmath>
#include <random>

#include "vanse/fields.hpp"

using namespace vanse;

TEST_CASE("periodic neighbours") {
  const Grid g(2, 8);
  CHECK(neighbor(g, {0, 0, 0}, {-1, 0, 0}) == IntVec{7, 0, 0});
  CHECK(neighbor(g, {7, 3, 0}, {1, 1, 0}) == IntVec{0, 4, 0});
  CHECK(neighbor(g, {5, 2, 0}, {0, 0, 0}) == IntVec{5, 2, 0});

  const Grid g3(3, 4);
  CHECK(g3.neighbor({0, 3, 0}, {0, 1, -1}) == IntVec{0, 0, 3});
  CHECK(g3.coords(g3.index({1, 2, 3})) == IntVec{1, 2, 3});
}

TEST_CASE("neighbour table agrees with the grid") {
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 5);
    const NeighborTable nb(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      for (int a = 0; a < d; ++a) {
        IntVec e{0, 0, 0};
        e[static_cast<std::size_t>(a)] = 1;
        CHECK(nb.plus(a, i) == g.neighbor_index(i, e));
        e[static_cast<std::size_t>(a)] = -1;
        CHECK(nb.minus(a, i) == g.neighbor_index(i, e));
        CHECK(nb.along(e, i) == nb.minus(a, i));
      }
    }
  }
}

TEST_CASE("central gradient examples") {
  const Grid g(1, 8);
  ScalarField phi(g, 0.5);
  phi.at({4, 0, 0}) = 0.8;
  phi.at({2, 0, 0}) = 0.2;
  const Vec3 grad = central_gradient(phi, {3, 0, 0}, 1.0);
  CHECK(grad[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(grad[1] == 0.0);

  const Grid g2(2, 6);
  const ScalarField flat(g2, 0.7);
  const Vec3 zero = central_gradient(flat, {2, 3, 0}, 0.1);
  CHECK(zero == Vec3{0.0, 0.0, 0.0});
}

TEST_CASE("central gradient is exact on affine fields away from the wrap") {
  const Grid g(2, 16);
  const double dx = 0.125;
  ScalarField phi(g);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const IntVec c = g.coords(i);
    phi[i] = 0.25 + 0.5 * c[0] * dx - 0.75 * c[1] * dx;
  }
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      const Vec3 grad = central_gradient(phi, {x, y, 0}, dx);
      CHECK(grad[0] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(grad[1] == doctest::Approx(-0.75).epsilon(1e-12));
    }
  }
}

TEST_CASE("central gradient of a periodic field sums to zero") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.1, 0.9);
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 9);
    ScalarField phi(g);
    for (std::size_t i = 0; i < g.cells(); ++i) phi[i] = dist(rng);
    VectorField grad(g);
    central_gradient(phi, 0.2, grad);
    for (int a = 0; a < 3; ++a) {
      double sum = 0.0;
      for (double v : grad.component(a)) sum += v;
      CHECK(std::abs(sum) <= 1e-12);
    }
    // The field-wide sweep and the pointwise form share arithmetic.
    for (std::size_t i = 0; i < g.cells(); ++i) CHECK(grad.at(i) == central_gradient(phi, g.coords(i), 0.2));
  }
}

TEST_CASE("quadrature examples in both forms") {
  const Grid g(1, 8);
  ScalarField phi(g, 0.6);
  const auto q1 = make_quadrature(1);
  CHECK(quadrature_integral(phi, {3, 0, 0}, q1) == doctest::Approx(0.6).epsilon(1e-15));
  const Grid g3(3, 4);
  const ScalarField flat3(g3, 0.6);
  CHECK(quadrature_integral(flat3, {1, 1, 1}, make_quadrature(3)) == doctest::Approx(0.6).epsilon(1e-15));

  phi.at({2, 0, 0}) = 0.2;
  phi.at({3, 0, 0}) = 0.5;
  phi.at({4, 0, 0}) = 0.9;
  CHECK(quadrature_integral(phi, {3, 0, 0}, q1) == doctest::Approx(0.525).epsilon(1e-15));
  CHECK(quadrature_integral_laplacian_form(phi, {3, 0, 0}, q1) == doctest::Approx(0.525).epsilon(1e-15));

  // Same neighbourhood in exact arithmetic: both forms give 21/40.
  auto sample = [](const IntVec& o) {
    if (o[0] < 0) return Rational(1, 5);
    if (o[0] > 0) return Rational(9, 10);
    return Rational(1, 2);
  };
  CHECK(quadrature_weighted_sum<Rational>(q1, sample).normalized() == Rational(21, 40));
  CHECK(quadrature_laplacian_form<Rational>(q1, sample).normalized() == Rational(21, 40));
}

TEST_CASE("quadrature of |x|^2 adds the off-centre weight times 2d") {
  for (int d = 1; d <= 3; ++d) {
    const auto q = make_quadrature(d);
    const IntVec c{3, -2, 5};
    auto sample = [&](const IntVec& o) {
      std::int64_t s = 0;
      for (int a = 0; a < d; ++a) {
        const std::int64_t v = c[static_cast<std::size_t>(a)] + o[static_cast<std::size_t>(a)];
        s += v * v;
      }
      return Rational(s);
    };
    const Rational center = sample({0, 0, 0});
    const Rational expected = (center + q.exact_off_center * Rational(2 * d)).normalized();
    CHECK(quadrature_weighted_sum<Rational>(q, sample).normalized() == expected);
    CHECK(quadrature_laplacian_form<Rational>(q, sample).normalized() == expected);
  }
}

TEST_CASE("weighted-sum and Laplacian forms agree on random fields") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> numer(1, 999);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int d = 1; d <= 3; ++d) {
    const auto q = make_quadrature(d);
    // Exact agreement in rationals.
    for (int trial = 0; trial < 200; ++trial) {
      Rational vals[7];
      for (auto& v : vals) v = Rational(numer(rng), 1000);
      auto sample = [&](const IntVec& o) {
        for (int i = 0; i < q.points; ++i) {
          const IntVec& off = q.offsets[static_cast<std::size_t>(i)];
          if (off == IntVec{-o[0], -o[1], -o[2]}) return vals[i];
        }
        return Rational(0);
      };
      CHECK(quadrature_weighted_sum<Rational>(q, sample).normalized() ==
            quadrature_laplacian_form<Rational>(q, sample).normalized());
    }
    // Rounding-level agreement in floating point.
    const Grid g(d, 6);
    ScalarField phi(g);
    for (std::size_t i = 0; i < g.cells(); ++i) phi[i] = dist(rng);
    ScalarField sweep(g);
    quadrature_integral(phi, q, sweep);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const IntVec c = g.coords(i);
      const double a = quadrature_integral(phi, c, q);
      CHECK(std::abs(a - quadrature_integral_laplacian_form(phi, c, q)) <= 1e-15);
      CHECK(sweep[i] == a);
    }
  }
}

TEST_CASE("population buffers swap") {
  const Grid g(2, 4);
  PopulationField f(g, 9);
  f.at(3, 5) = 1.5;
  f.next()[0] = 2.5;
  f.swap();
  CHECK(f.at(0, 0) == 2.5);
  CHECK(f.next()[3 * g.cells() + 5] == 1.5);
  CHECK(f.cell(0).size() == 9);
}
