#include "lrqc/lowrank.hpp"

#include <Eigen/SVD>
#include <limits>
#include <stdexcept>

namespace lrqc {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXcd> full_svd(const Eigen::MatrixXcd& A) {
  if (!A.allFinite())
    throw std::invalid_argument("svd: non-finite matrix entries");
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(
      A, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

Eigen::MatrixXcd SeparableForm::reconstruct(int rows, int cols) const {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(rows, cols);
  for (const auto& t : terms) A += t.sigma * t.u * t.v.adjoint();
  return A;
}

SvdFactors svd(const Eigen::MatrixXcd& A) {
  const auto dec = full_svd(A);
  SvdFactors f;
  f.U = dec.matrixU();
  f.S = dec.singularValues();
  f.V = dec.matrixV();
  return f;
}

double trace_norm(const Eigen::MatrixXcd& A) {
  return full_svd(A).singularValues().sum();
}

int numerical_rank(const Eigen::MatrixXcd& A, double tol) {
  const Eigen::VectorXd s = full_svd(A).singularValues();
  if (s.size() == 0) return 0;
  const double floor = s(0) * std::max(A.rows(), A.cols()) *
                       std::numeric_limits<double>::epsilon();
  const double threshold = std::max(tol, floor);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold) ++rank;
  return rank;
}

Eigen::MatrixXcd svt(const Eigen::MatrixXcd& Y, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("svt: tau must be positive");
  const auto dec = full_svd(Y);
  Eigen::VectorXd s = dec.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s(i) = std::max(s(i) - tau, 0.0);
  return dec.matrixU() * s.asDiagonal() * dec.matrixV().adjoint();
}

SeparableForm separable_terms(const Eigen::MatrixXcd& A, double tol) {
  if (tol < 0.0) throw std::invalid_argument("separable_terms: tol < 0");
  const auto dec = full_svd(A);
  const Eigen::VectorXd& s = dec.singularValues();
  const double floor =
      s.size() ? s(0) * std::max(A.rows(), A.cols()) *
                     std::numeric_limits<double>::epsilon()
               : 0.0;
  SeparableForm form;
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    if (s(r) <= std::max(tol, floor)) break;
    form.terms.push_back({s(r), dec.matrixU().col(r), dec.matrixV().col(r)});
  }
  return form;
}

}  // namespace lrqc
