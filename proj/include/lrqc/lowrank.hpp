#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace lrqc {

/// Thin SVD A = U diag(S) V^H with S non-increasing and positive.
struct SvdFactors {
  Eigen::MatrixXcd U;
  Eigen::VectorXd S;
  Eigen::MatrixXcd V;
};

/// One term of a sum-of-products representation: sigma * u v^H, i.e.
/// sigma * (u . basis_u) * conj(v) . basis_v when read as a spline.
struct SeparableTerm {
  double sigma;
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;
};

struct SeparableForm {
  std::vector<SeparableTerm> terms;
  Eigen::MatrixXcd reconstruct(int rows, int cols) const;
};

SvdFactors svd(const Eigen::MatrixXcd& A);

/// Sum of singular values.
double trace_norm(const Eigen::MatrixXcd& A);

/// Number of singular values above tol. The threshold is floored at
/// sigma_max * max(m,n) * machine-epsilon so roundoff never counts.
int numerical_rank(const Eigen::MatrixXcd& A, double tol = 1e-5);

/// Singular value thresholding: the proximal operator of tau * trace norm,
/// U max(S - tau, 0) V^H. Unique minimizer of tau||Z||_* + 0.5||Z - Y||_F^2.
Eigen::MatrixXcd svt(const Eigen::MatrixXcd& Y, double tau);

/// Truncated SVD terms with sigma_r > tol (tol = 0 keeps everything
/// numerically nonzero).
SeparableForm separable_terms(const Eigen::MatrixXcd& A, double tol);

}  // namespace lrqc
