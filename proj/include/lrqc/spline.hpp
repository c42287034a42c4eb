#pragma once

#include <Eigen/Core>
#include <vector>

namespace lrqc {

/// Univariate B-spline space over an open (clamped) knot vector on [0,1].
///
/// The space is immutable after construction and all evaluations are pure,
/// so a single instance may be shared freely across threads.
class SplineSpace {
 public:
  /// Degree-0 single-span placeholder; useful only as a default member.
  SplineSpace() : SplineSpace(0, {0.0, 1.0}) {}
  SplineSpace(int degree, std::vector<double> knots);

  /// Open uniform knots with num_basis - degree equal interior spans.
  static SplineSpace open_uniform(int degree, int num_basis);

  int degree() const { return degree_; }
  int num_basis() const { return num_basis_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Index s with knots[s] <= t < knots[s+1]; t = 1 is attributed to the
  /// last nonempty span so the right domain edge is well-defined.
  int find_span(double t) const;

  /// Nonzero basis values at t. values must hold degree+1 entries
  /// (basis indices span-degree .. span). Returns the span index.
  int eval_basis(double t, double* values) const;

  /// Basis values and derivatives up to `order` (order <= degree).
  /// ders is resized to (order+1) x (degree+1); row k holds the k-th
  /// derivatives of the nonzero functions. Returns the span index.
  int eval_basis_derivatives(double t, int order, Eigen::MatrixXd& ders) const;

  /// Knot averages; coefficients placed at these abscissae reproduce
  /// linear functions.
  std::vector<double> greville() const;

  /// Distinct knot values (span boundaries), including 0 and 1.
  std::vector<double> breakpoints() const;

  bool operator==(const SplineSpace& o) const {
    return degree_ == o.degree_ && knots_ == o.knots_;
  }

 private:
  int degree_;
  int num_basis_;
  std::vector<double> knots_;
};

}  // namespace lrqc
