#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "lrqc/map.hpp"
#include "lrqc/quality.hpp"

using namespace lrqc;

namespace {

const SplineSpace kSu = SplineSpace::open_uniform(3, 9);
const SplineSpace kSv = SplineSpace::open_uniform(3, 7);

TensorMap affine_map(Complex a, Complex b, Complex shift = 0.0) {
  const auto gu = kSu.greville();
  const auto gv = kSv.greville();
  Eigen::MatrixXcd c(kSu.num_basis(), kSv.num_basis());
  for (int i = 0; i < kSu.num_basis(); ++i)
    for (int j = 0; j < kSv.num_basis(); ++j) {
      const Complex z(gu[i], gv[j]);
      c(i, j) = a * z + b * std::conj(z) + shift;
    }
  return TensorMap(kSu, kSv, c);
}

// A moderately distorted but bijective smooth map.
TensorMap wavy_map() {
  const auto gu = kSu.greville();
  const auto gv = kSv.greville();
  Eigen::MatrixXcd c(kSu.num_basis(), kSv.num_basis());
  for (int i = 0; i < kSu.num_basis(); ++i)
    for (int j = 0; j < kSv.num_basis(); ++j) {
      const double x = gu[i], y = gv[j];
      c(i, j) = Complex(x + 0.08 * std::sin(3.0 * y), y - 0.06 * std::cos(2.0 * x));
    }
  return TensorMap(kSu, kSv, c);
}

}  // namespace

TEST_CASE("sup_mu of reference maps") {
  const TensorMap id = TensorMap::identity(kSu, kSv);
  CHECK(sample_sup_mu(id, 50) <= 1e-12);
  const TensorMap f = affine_map(1.0, 0.3);
  CHECK(sample_sup_mu(f, 50) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK_THROWS(sample_sup_mu(id, 1));
}

TEST_CASE("grid stability of sup_mu on a smooth map") {
  const TensorMap f = wavy_map();
  const double coarse = sample_sup_mu(f, 100);
  const double fine = sample_sup_mu(f, 200);
  CHECK(std::abs(fine - coarse) < 1e-2);
}

TEST_CASE("scaled jacobian extrema normalize out scale") {
  const TensorMap id = TensorMap::identity(kSu, kSv);
  const auto [lo_id, hi_id] = scaled_jacobian_extrema(id, 40);
  CHECK(lo_id == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi_id == doctest::Approx(1.0).epsilon(1e-12));

  const TensorMap twice = affine_map(2.0, 0.0);
  const auto [lo2, hi2] = scaled_jacobian_extrema(twice, 40);
  CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scale invariance of the quality numbers") {
  const TensorMap f = wavy_map();
  const double sup = sample_sup_mu(f, 60);
  const auto [lo, hi] = scaled_jacobian_extrema(f, 60);
  const Complex s(0.7, 1.1);  // rotation + scaling
  const Complex t(-2.0, 5.0);
  const TensorMap g(kSu, kSv,
                    (s * f.coeffs().array() + t).matrix());
  CHECK(std::abs(sample_sup_mu(g, 60) - sup) <= 1e-10);
  const auto [lo_g, hi_g] = scaled_jacobian_extrema(g, 60);
  CHECK(std::abs(lo_g - lo) <= 1e-10);
  CHECK(std::abs(hi_g - hi) <= 1e-10);
}

TEST_CASE("cell_area_distortion of conformal maps and normalization") {
  const TensorMap id = TensorMap::identity(kSu, kSv);
  const Eigen::MatrixXd cells = cell_area_distortion(id, 5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(cells(i, j) == doctest::Approx(1.0).epsilon(1e-12));

  const TensorMap twice = affine_map(2.0, 0.0);
  CHECK(cell_area_distortion(twice, 3, 3).maxCoeff() ==
        doctest::Approx(1.0).epsilon(1e-12));

  // The weighted grand total is always 1: cells partition the area.
  const TensorMap f = wavy_map();
  const Eigen::MatrixXd wf = cell_area_distortion(f, 7, 5);
  CHECK(wf.minCoeff() > 0.0);
  CHECK(wf.sum() / (7.0 * 5.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(cell_area_distortion(f, 0, 3));
}

TEST_CASE("cell_area_distortion block averaging consistency") {
  const TensorMap f = wavy_map();
  const Eigen::MatrixXd coarse = cell_area_distortion(f, 4, 3);
  const Eigen::MatrixXd fine = cell_area_distortion(f, 8, 6);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const double avg = 0.25 * (fine(2 * i, 2 * j) + fine(2 * i + 1, 2 * j) +
                                 fine(2 * i, 2 * j + 1) +
                                 fine(2 * i + 1, 2 * j + 1));
      CHECK(std::abs(avg - coarse(i, j)) <= 1e-8);
    }
}

TEST_CASE("injectivity check detects folds") {
  const TensorMap id = TensorMap::identity(kSu, kSv);
  const InjectivityResult ok = injectivity_check(id, 50);
  CHECK(ok.is_locally_injective);
  CHECK(ok.min_jacobian == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ok.degenerate_count == 0);

  const TensorMap fold = affine_map(0.0, 1.0);  // f = conj(z), J = -1
  const InjectivityResult bad = injectivity_check(fold, 50);
  CHECK_FALSE(bad.is_locally_injective);
  CHECK(bad.min_jacobian == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("make_report aggregates and serializes") {
  const TensorMap f = wavy_map();
  const QualityReport rep = make_report(f, 60, 4, 4, 1e-5);
  CHECK(rep.grid_n == 60);
  CHECK(rep.locally_injective);
  CHECK(rep.sup_mu > 0.0);
  CHECK(rep.sup_mu < 1.0);
  CHECK(rep.min_scaled_jac > 0.0);
  CHECK(rep.max_scaled_jac >= rep.min_scaled_jac);
  CHECK(rep.numerical_rank >= 2);
  CHECK(rep.cell_area_distortion.rows() == 4);

  std::ostringstream kv;
  rep.write_keyvalue(kv);
  CHECK(kv.str().find("sup_mu=") != std::string::npos);
  CHECK(kv.str().find("locally_injective=1") != std::string::npos);

  std::ostringstream csv;
  rep.write_cell_csv(csv);
  CHECK(csv.str().rfind("4,4,cell_area_distortion", 0) == 0);
}
