#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrqc/quadrature.hpp"

using namespace lrqc;

TEST_CASE("gauss_legendre nodes and weights") {
  std::vector<double> x, w;
  gauss_legendre(1, x, w);
  CHECK(x[0] == doctest::Approx(0.0));
  CHECK(w[0] == doctest::Approx(2.0));

  gauss_legendre(2, x, w);
  CHECK(x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(3.0)));

  // n points integrate monomials up to degree 2n-1 exactly on [-1,1].
  for (int n = 1; n <= 8; ++n) {
    gauss_legendre(n, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += w[k] * std::pow(x[k], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  CHECK_THROWS(gauss_legendre(0, x, w));
}

TEST_CASE("build_quadrature spans and weights") {
  const SplineSpace su = SplineSpace::open_uniform(3, 7);  // 4 spans
  const SplineSpace sv = SplineSpace::open_uniform(2, 4);  // 2 spans
  const QuadratureGrid grid = build_quadrature(su, sv);
  CHECK(grid.u.num_spans() == 4);
  CHECK(grid.v.num_spans() == 2);
  CHECK(grid.u.pts_per_span == 4);  // degree + 1 default
  CHECK(grid.v.pts_per_span == 3);
  double wu = 0.0, wv = 0.0;
  for (double w : grid.u.weights) wu += w;
  for (double w : grid.v.weights) wv += w;
  CHECK(wu == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wv == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single-span degree-3 rule uses scaled Gauss nodes") {
  const SplineSpace bez = SplineSpace::open_uniform(3, 4);
  const QuadratureGrid grid = build_quadrature(bez, bez, 4);
  std::vector<double> x, w;
  gauss_legendre(4, x, w);
  REQUIRE(grid.u.num_nodes() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(grid.u.nodes[k] == doctest::Approx(0.5 * (x[k] + 1.0)).epsilon(1e-14));
}

TEST_CASE("grid integrates polynomials exactly") {
  const SplineSpace su = SplineSpace::open_uniform(3, 9);
  const QuadratureGrid grid = build_quadrature(su, su);
  double ix3 = 0.0, ixy = 0.0;
  for (int a = 0; a < grid.u.num_nodes(); ++a)
    for (int b = 0; b < grid.v.num_nodes(); ++b) {
      const double w = grid.u.weights[a] * grid.v.weights[b];
      ix3 += w * std::pow(grid.u.nodes[a], 3);
      ixy += w * grid.u.nodes[a] * grid.v.nodes[b];
    }
  CHECK(ix3 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ixy == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("merged extra breakpoints refine the spans") {
  const SplineSpace coarse = SplineSpace::open_uniform(3, 5);  // spans at 0,1/2,1
  const SplineSpace fine = SplineSpace::open_uniform(3, 7);    // spans at k/4
  const QuadratureGrid grid =
      build_quadrature(coarse, coarse, 0, fine.breakpoints(), {});
  CHECK(grid.u.num_spans() == 4);  // union of {0,.5,1} and {0,.25,.5,.75,1}
  CHECK(grid.v.num_spans() == 2);
  // Duplicate breakpoints are not inserted twice.
  const QuadratureGrid same =
      build_quadrature(coarse, coarse, 0, coarse.breakpoints(), {});
  CHECK(same.u.num_spans() == 2);
}

TEST_CASE("basis cache matches direct evaluation") {
  const SplineSpace su = SplineSpace::open_uniform(3, 8);
  const SplineSpace sv = SplineSpace::open_uniform(2, 6);
  const QuadratureGrid grid = build_quadrature(su, sv);
  std::vector<double> v(su.degree() + 1);
  for (int a = 0; a < grid.u.num_nodes(); ++a) {
    const int span = su.eval_basis(grid.u.nodes[a], v.data());
    CHECK(grid.bu.span[a] == span);
    for (int k = 0; k <= su.degree(); ++k)
      CHECK(grid.bu.val(a, k) == doctest::Approx(v[k]).epsilon(1e-14));
  }
  CHECK(grid.bv.num_basis == 6);
  CHECK(grid.bv.degree == 2);
}

TEST_CASE("cubic B-spline mass integral against closed form") {
  // On a uniform cubic space the full mass matrix row sums integrate each
  // basis function: sum_i int B_i = 1. Also check one analytic value: the
  // integral of the 1D cardinal cubic B-spline over a single-span Bezier
  // space, int_0^1 B_0 = 1/4 (Bernstein b_{0,3}).
  const SplineSpace bez = SplineSpace::open_uniform(3, 4);
  const QuadratureGrid grid = build_quadrature(bez, bez);
  Eigen::Vector4d integral = Eigen::Vector4d::Zero();
  for (int a = 0; a < grid.u.num_nodes(); ++a)
    for (int k = 0; k <= 3; ++k)
      integral(grid.bu.span[a] - 3 + k) += grid.u.weights[a] * grid.bu.val(a, k);
  for (int i = 0; i < 4; ++i)
    CHECK(integral(i) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("tabulate at arbitrary nodes") {
  const SplineSpace space = SplineSpace::open_uniform(3, 10);
  const std::vector<double> nodes{0.0, 0.2, 0.55, 1.0};
  const BasisCache cache = tabulate(space, nodes);
  CHECK(cache.val.rows() == 4);
  CHECK(cache.val.cols() == 4);
  double sum0 = cache.val.row(1).sum();
  CHECK(sum0 == doctest::Approx(1.0).epsilon(1e-13));
  // Derivative rows sum to zero (derivative of the partition of unity).
  CHECK(cache.der.row(2).sum() == doctest::Approx(0.0).epsilon(1e-12));
}
