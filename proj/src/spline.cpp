#include "lrqc/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrqc {

SplineSpace::SplineSpace(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree < 0) throw std::invalid_argument("spline degree must be >= 0");
  num_basis_ = static_cast<int>(knots_.size()) - degree_ - 1;
  if (num_basis_ < degree_ + 1)
    throw std::invalid_argument("knot vector too short: num_basis < degree+1");
  for (size_t i = 1; i < knots_.size(); ++i)
    if (knots_[i] < knots_[i - 1])
      throw std::invalid_argument("knots must be non-decreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != 0.0)
      throw std::invalid_argument("open knot vector: first degree+1 knots must be 0");
    if (knots_[knots_.size() - 1 - i] != 1.0)
      throw std::invalid_argument("open knot vector: last degree+1 knots must be 1");
  }
  // Interior multiplicity <= degree keeps at least C^0 continuity.
  int run = 1;
  for (int i = degree_ + 2; i < num_basis_; ++i) {
    run = (knots_[i] == knots_[i - 1]) ? run + 1 : 1;
    if (knots_[i] > 0.0 && knots_[i] < 1.0 && run > degree_)
      throw std::invalid_argument("interior knot multiplicity exceeds degree");
  }
}

SplineSpace SplineSpace::open_uniform(int degree, int num_basis) {
  if (num_basis < degree + 1)
    throw std::invalid_argument("open_uniform: num_basis must be >= degree+1");
  const int spans = num_basis - degree;
  std::vector<double> knots(num_basis + degree + 1);
  for (int i = 0; i <= degree; ++i) {
    knots[i] = 0.0;
    knots[num_basis + i] = 1.0;
  }
  for (int i = 1; i < spans; ++i)
    knots[degree + i] = static_cast<double>(i) / spans;
  return SplineSpace(degree, std::move(knots));
}

int SplineSpace::find_span(double t) const {
  if (t < 0.0 || t > 1.0)
    throw std::domain_error("parameter outside [0,1]: " + std::to_string(t));
  if (t >= 1.0) return num_basis_ - 1;
  auto it = std::upper_bound(knots_.begin() + degree_,
                             knots_.begin() + num_basis_ + 1, t);
  return static_cast<int>(it - knots_.begin()) - 1;
}

int SplineSpace::eval_basis(double t, double* values) const {
  const int p = degree_;
  const int s = find_span(t);
  // de Boor recursion over the nonzero functions (NURBS book A2.2).
  std::vector<double> left(p + 1), right(p + 1);
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots_[s + 1 - j];
    right[j] = knots_[s + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return s;
}

int SplineSpace::eval_basis_derivatives(double t, int order,
                                        Eigen::MatrixXd& ders) const {
  const int p = degree_;
  if (order < 1 || order > p)
    throw std::invalid_argument("derivative order must be in [1, degree]");
  const int s = find_span(t);
  const int n = order;

  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots_[s + 1 - j];
    right[j] = knots_[s + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  ders.setZero(n + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
  return s;
}

std::vector<double> SplineSpace::greville() const {
  std::vector<double> g(num_basis_);
  if (degree_ == 0) {
    for (int i = 0; i < num_basis_; ++i)
      g[i] = 0.5 * (knots_[i] + knots_[i + 1]);
    return g;
  }
  for (int i = 0; i < num_basis_; ++i) {
    double sum = 0.0;
    for (int j = 1; j <= degree_; ++j) sum += knots_[i + j];
    g[i] = sum / degree_;
  }
  return g;
}

std::vector<double> SplineSpace::breakpoints() const {
  std::vector<double> bp;
  for (double k : knots_)
    if (bp.empty() || k > bp.back()) bp.push_back(k);
  return bp;
}

}  // namespace lrqc
