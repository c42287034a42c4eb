#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "lrqc/spline.hpp"

namespace lrqc {

using Complex = std::complex<double>;

/// Four boundary control polygons of a planar domain. bottom/top live in
/// space_u (m+1 points each), left/right in space_v (n+1 points each).
struct BoundaryCurves {
  SplineSpace space_u;
  SplineSpace space_v;
  std::vector<Complex> bottom, top, left, right;

  /// Throws on dimension mismatch, corner incompatibility, or a curve
  /// collapsed to a point.
  void validate() const;

  double bbox_diag() const;
  Complex eval_bottom(double t) const;
  Complex eval_top(double t) const;
  Complex eval_left(double t) const;
  Complex eval_right(double t) const;
};

/// Tensor-product spline map f(x,y) = sum c_ij M_i(x) N_j(y) from the unit
/// square into the complex plane. Immutable; solvers build new maps.
class TensorMap {
 public:
  TensorMap(SplineSpace space_u, SplineSpace space_v, Eigen::MatrixXcd coeffs);

  /// c_ij = greville_u[i] + i * greville_v[j]; reproduces z exactly.
  static TensorMap identity(const SplineSpace& su, const SplineSpace& sv);

  const SplineSpace& space_u() const { return su_; }
  const SplineSpace& space_v() const { return sv_; }
  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  int m() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int n() const { return static_cast<int>(coeffs_.cols()) - 1; }

  Complex eval(double x, double y) const;

  /// (f_z, f_zbar) with f_z = (f_x - i f_y)/2, f_zbar = (f_x + i f_y)/2.
  std::pair<Complex, Complex> complex_partials(double x, double y) const;

  /// Beltrami coefficient via the a,b,c,d derivative sums of the real and
  /// imaginary coefficient parts. Throws when |f_z| falls under the
  /// scale-relative degeneracy tolerance.
  Complex beltrami(double x, double y) const;

  /// |f_z|^2 - |f_zbar|^2; positive iff locally orientation-preserving.
  double jacobian(double x, double y) const;

  bool degenerate_at(double x, double y) const;

  /// Bounding-box diagonal of the coefficients; the scale used by the
  /// degeneracy tolerance.
  double coeff_scale() const { return scale_; }

 private:
  SplineSpace su_, sv_;
  Eigen::MatrixXcd coeffs_;
  double scale_;
};

/// Integral of the Jacobian over the unit square (signed area of the image),
/// Gauss quadrature per knot span.
double domain_area(const TensorMap& map);

/// Discrete Coons patch: bilinear blend of the boundary polygons with the
/// normalized Greville abscissae as blending parameters. Interpolates the
/// boundary exactly; the coefficient matrix is a sum of six outer products.
TensorMap coons(const BoundaryCurves& boundary);

/// Overwrite the boundary coefficient rows/columns with the exact boundary
/// control points, leaving the interior untouched.
TensorMap snap_boundary(const TensorMap& map, const BoundaryCurves& boundary);

/// Vectorization order of the coefficient matrix: index = j*(m+1) + i.
inline int vec_index(int i, int j, int m) { return j * (m + 1) + i; }
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& C);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& c, int m, int n);

namespace detail {
Complex tensor_eval(const SplineSpace& su, const SplineSpace& sv,
                    const Eigen::MatrixXcd& coeffs, double x, double y);
}  // namespace detail

}  // namespace lrqc
