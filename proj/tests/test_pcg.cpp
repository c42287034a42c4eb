#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "lrqc/pcg.hpp"

using namespace lrqc;

TEST_CASE("identity system converges immediately") {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(10, 1.0, 10.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
  const PcgResult r = pcg([](const Eigen::VectorXd& v) { return v; }, b, x,
                          IdentityPreconditioner{}, 1e-12, 100);
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
  CHECK((x - b).norm() <= 1e-12);
}

TEST_CASE("diagonal system: iterations bounded by distinct eigenvalues") {
  // Diagonal with 3 distinct values; CG terminates in <= 3 iterations.
  Eigen::VectorXd d(12);
  for (int i = 0; i < 12; ++i) d(i) = 1.0 + (i % 3);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(12);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(12);
  const PcgResult r =
      pcg([&d](const Eigen::VectorXd& v) { return (d.array() * v.array()).matrix().eval(); },
          b, x, IdentityPreconditioner{}, 1e-12, 100);
  CHECK(r.converged);
  CHECK(r.iterations <= 3);
  CHECK((x - (b.array() / d.array()).matrix()).norm() <= 1e-10);
}

TEST_CASE("random SPD 200x200 matches a dense factorization") {
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd G(200, 200);
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) G(i, j) = gauss(rng);
  const Eigen::MatrixXd A =
      G * G.transpose() + 200.0 * Eigen::MatrixXd::Identity(200, 200);
  Eigen::VectorXd b(200);
  for (int i = 0; i < 200; ++i) b(i) = gauss(rng);

  const Eigen::VectorXd exact = Eigen::LLT<Eigen::MatrixXd>(A).solve(b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(200);
  const PcgResult r =
      pcg([&A](const Eigen::VectorXd& v) { return (A * v).eval(); }, b, x,
          IdentityPreconditioner{}, 1e-12, 2000);
  CHECK(r.converged);
  CHECK((x - exact).norm() <= 1e-8 * exact.norm());
}

TEST_CASE("jacobi preconditioner accelerates an ill-scaled system") {
  const int n = 150;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = std::pow(10.0, 4.0 * i / (n - 1));
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = gauss(rng);
  const auto apply = [&d](const Eigen::VectorXd& v) {
    return (d.array() * v.array()).matrix().eval();
  };

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  const PcgResult plain = pcg(apply, b, x0, IdentityPreconditioner{}, 1e-10, 5000);
  Eigen::SparseMatrix<double> D(n, n);
  for (int i = 0; i < n; ++i) D.insert(i, i) = d(i);
  Eigen::VectorXd x1 = Eigen::VectorXd::Zero(n);
  const PcgResult prec =
      pcg(apply, b, x1, JacobiPreconditioner<double>(D), 1e-10, 5000);
  CHECK(prec.converged);
  CHECK(prec.iterations <= 2);  // preconditioned system is the identity
  CHECK(prec.iterations < plain.iterations);
}

TEST_CASE("complex Hermitian system") {
  const int n = 60;
  std::mt19937 rng(9);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  const Eigen::MatrixXcd A =
      G * G.adjoint() + 50.0 * Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXcd b(n);
  for (int i = 0; i < n; ++i) b(i) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  const PcgResult r =
      pcg([&A](const Eigen::VectorXcd& v) { return (A * v).eval(); }, b, x,
          IdentityPreconditioner{}, 1e-12, 1000);
  CHECK(r.converged);
  CHECK((A * x - b).norm() <= 1e-9 * b.norm());
}

TEST_CASE("warm start is honored") {
  const int n = 40;
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(n, 1.0, 5.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd exact = (b.array() / d.array()).matrix();
  const auto apply = [&d](const Eigen::VectorXd& v) {
    return (d.array() * v.array()).matrix().eval();
  };
  Eigen::VectorXd x = exact;  // already solved
  const PcgResult r = pcg(apply, b, x, IdentityPreconditioner{}, 1e-12, 100);
  CHECK(r.iterations == 0);
  CHECK((x - exact).norm() == 0.0);
}

TEST_CASE("non-positive curvature is reported as an error") {
  // Negative definite diagonal; CG must signal breakdown rather than loop.
  Eigen::VectorXd d(5);
  d << -1.0, -1.5, -2.0, -3.0, -4.0;
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(5);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  CHECK_THROWS(pcg(
      [&d](const Eigen::VectorXd& v) { return (d.array() * v.array()).matrix().eval(); },
      b, x, IdentityPreconditioner{}, 1e-12, 100));
}
