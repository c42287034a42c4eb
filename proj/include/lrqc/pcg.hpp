#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>

namespace lrqc {

struct PcgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

template <typename Scalar>
struct JacobiPreconditioner {
  Eigen::Vector<Scalar, Eigen::Dynamic> inv_diag;

  explicit JacobiPreconditioner(const Eigen::SparseMatrix<Scalar>& A) {
    inv_diag = A.diagonal();
    for (Eigen::Index i = 0; i < inv_diag.size(); ++i) {
      if (std::abs(inv_diag(i)) == 0.0)
        throw std::runtime_error("jacobi preconditioner: zero diagonal");
      inv_diag(i) = Scalar(1.0) / inv_diag(i);
    }
  }

  Eigen::Vector<Scalar, Eigen::Dynamic> operator()(
      const Eigen::Vector<Scalar, Eigen::Dynamic>& r) const {
    return inv_diag.cwiseProduct(r);
  }
};

struct IdentityPreconditioner {
  template <typename Vec>
  Vec operator()(const Vec& r) const {
    return r;
  }
};

/// Preconditioned conjugate gradients for a Hermitian positive definite
/// operator. Non-positive curvature signals a non-PD system and throws.
/// x holds the initial guess on entry and the solution on return.
template <typename Vec, typename MatVec, typename Precond>
PcgResult pcg(const MatVec& apply_A, const Vec& b, Vec& x, const Precond& M,
              double tol, int max_iters) {
  const double bnorm = b.norm();
  PcgResult result;
  if (bnorm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }
  Vec r = b - apply_A(x);
  double rnorm = r.norm();
  if (rnorm <= tol * bnorm) {
    result.relative_residual = rnorm / bnorm;
    result.converged = true;
    return result;
  }
  Vec z = M(r);
  Vec p = z;
  double rz = std::real(std::complex<double>(r.dot(z)));
  for (int it = 1; it <= max_iters; ++it) {
    const Vec Ap = apply_A(p);
    const double pAp = std::real(std::complex<double>(p.dot(Ap)));
    if (pAp <= 0.0)
      throw std::runtime_error("pcg: non-positive curvature (system not PD)");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    rnorm = r.norm();
    result.iterations = it;
    result.relative_residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) {
      result.converged = true;
      return result;
    }
    z = M(r);
    const double rz_new = std::real(std::complex<double>(r.dot(z)));
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return result;
}

}  // namespace lrqc
