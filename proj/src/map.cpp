#include "lrqc/map.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrqc/quadrature.hpp"

namespace lrqc {

namespace {

constexpr double kDegenerateFactor = 1e-14;

double bbox_diag_of(const Eigen::MatrixXcd& c) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      xmin = std::min(xmin, c(i, j).real());
      xmax = std::max(xmax, c(i, j).real());
      ymin = std::min(ymin, c(i, j).imag());
      ymax = std::max(ymax, c(i, j).imag());
    }
  return std::hypot(xmax - xmin, ymax - ymin);
}

}  // namespace

namespace detail {

Complex tensor_eval(const SplineSpace& su, const SplineSpace& sv,
                    const Eigen::MatrixXcd& coeffs, double x, double y) {
  const int p = su.degree(), q = sv.degree();
  std::vector<double> bu(p + 1), bv(q + 1);
  const int sx = su.eval_basis(x, bu.data());
  const int sy = sv.eval_basis(y, bv.data());
  Complex out(0.0, 0.0);
  for (int j = 0; j <= q; ++j) {
    Complex row(0.0, 0.0);
    for (int i = 0; i <= p; ++i)
      row += coeffs(sx - p + i, sy - q + j) * bu[i];
    out += row * bv[j];
  }
  return out;
}

}  // namespace detail

void BoundaryCurves::validate() const {
  const size_t mu = static_cast<size_t>(space_u.num_basis());
  const size_t nv = static_cast<size_t>(space_v.num_basis());
  if (bottom.size() != mu || top.size() != mu)
    throw std::invalid_argument("bottom/top size must match space_u basis count");
  if (left.size() != nv || right.size() != nv)
    throw std::invalid_argument("left/right size must match space_v basis count");
  const double tol = 1e-12 * std::max(bbox_diag(), 1e-300);
  auto check_corner = [&](Complex a, Complex b, const char* what) {
    if (std::abs(a - b) > tol)
      throw std::invalid_argument(std::string("corner mismatch: ") + what);
  };
  check_corner(bottom.front(), left.front(), "bottom[0] != left[0]");
  check_corner(bottom.back(), right.front(), "bottom[m] != right[0]");
  check_corner(top.front(), left.back(), "top[0] != left[n]");
  check_corner(top.back(), right.back(), "top[m] != right[n]");
  auto check_degenerate = [&](const std::vector<Complex>& c, const char* what) {
    for (const Complex& z : c)
      if (std::abs(z - c.front()) > tol) return;
    throw std::invalid_argument(std::string("degenerate boundary curve: ") + what);
  };
  check_degenerate(bottom, "bottom");
  check_degenerate(top, "top");
  check_degenerate(left, "left");
  check_degenerate(right, "right");
}

double BoundaryCurves::bbox_diag() const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto* curve : {&bottom, &top, &left, &right})
    for (const Complex& z : *curve) {
      xmin = std::min(xmin, z.real());
      xmax = std::max(xmax, z.real());
      ymin = std::min(ymin, z.imag());
      ymax = std::max(ymax, z.imag());
    }
  return std::hypot(xmax - xmin, ymax - ymin);
}

namespace {
Complex curve_eval(const SplineSpace& s, const std::vector<Complex>& c,
                   double t) {
  const int p = s.degree();
  std::vector<double> b(p + 1);
  const int span = s.eval_basis(t, b.data());
  Complex out(0.0, 0.0);
  for (int i = 0; i <= p; ++i) out += c[span - p + i] * b[i];
  return out;
}
}  // namespace

Complex BoundaryCurves::eval_bottom(double t) const {
  return curve_eval(space_u, bottom, t);
}
Complex BoundaryCurves::eval_top(double t) const {
  return curve_eval(space_u, top, t);
}
Complex BoundaryCurves::eval_left(double t) const {
  return curve_eval(space_v, left, t);
}
Complex BoundaryCurves::eval_right(double t) const {
  return curve_eval(space_v, right, t);
}

TensorMap::TensorMap(SplineSpace space_u, SplineSpace space_v,
                     Eigen::MatrixXcd coeffs)
    : su_(std::move(space_u)), sv_(std::move(space_v)),
      coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != su_.num_basis() || coeffs_.cols() != sv_.num_basis())
    throw std::invalid_argument("coefficient matrix does not match spaces");
  if (!coeffs_.allFinite())
    throw std::invalid_argument("non-finite map coefficients");
  scale_ = bbox_diag_of(coeffs_);
}

TensorMap TensorMap::identity(const SplineSpace& su, const SplineSpace& sv) {
  const auto gu = su.greville();
  const auto gv = sv.greville();
  Eigen::MatrixXcd c(su.num_basis(), sv.num_basis());
  for (int j = 0; j < sv.num_basis(); ++j)
    for (int i = 0; i < su.num_basis(); ++i)
      c(i, j) = Complex(gu[i], gv[j]);
  return TensorMap(su, sv, std::move(c));
}

Complex TensorMap::eval(double x, double y) const {
  return detail::tensor_eval(su_, sv_, coeffs_, x, y);
}

std::pair<Complex, Complex> TensorMap::complex_partials(double x,
                                                        double y) const {
  const int p = su_.degree(), q = sv_.degree();
  Eigen::MatrixXd du, dv;
  const int sx = su_.eval_basis_derivatives(x, 1, du);
  const int sy = sv_.eval_basis_derivatives(y, 1, dv);
  Complex fx(0.0, 0.0), fy(0.0, 0.0);
  for (int j = 0; j <= q; ++j)
    for (int i = 0; i <= p; ++i) {
      const Complex c = coeffs_(sx - p + i, sy - q + j);
      fx += c * (du(1, i) * dv(0, j));
      fy += c * (du(0, i) * dv(1, j));
    }
  const Complex iu(0.0, 1.0);
  return {0.5 * (fx - iu * fy), 0.5 * (fx + iu * fy)};
}

Complex TensorMap::beltrami(double x, double y) const {
  const int p = su_.degree(), q = sv_.degree();
  Eigen::MatrixXd du, dv;
  const int sx = su_.eval_basis_derivatives(x, 1, du);
  const int sy = sv_.eval_basis_derivatives(y, 1, dv);
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (int j = 0; j <= q; ++j)
    for (int i = 0; i <= p; ++i) {
      const Complex cf = coeffs_(sx - p + i, sy - q + j);
      const double dMN = du(1, i) * dv(0, j);
      const double MdN = du(0, i) * dv(1, j);
      a += cf.real() * dMN;
      b += cf.imag() * MdN;
      c += cf.imag() * dMN;
      d += cf.real() * MdN;
    }
  const Complex denom(a + b, c - d);
  if (std::abs(denom) <= 2.0 * kDegenerateFactor * scale_)
    throw std::runtime_error("beltrami: degenerate point (f_z ~ 0)");
  return Complex(a - b, c + d) / denom;
}

double TensorMap::jacobian(double x, double y) const {
  const auto [fz, fzbar] = complex_partials(x, y);
  return std::norm(fz) - std::norm(fzbar);
}

bool TensorMap::degenerate_at(double x, double y) const {
  const auto [fz, fzbar] = complex_partials(x, y);
  (void)fzbar;
  return std::abs(fz) <= kDegenerateFactor * scale_;
}

double domain_area(const TensorMap& map) {
  const int p = map.space_u().degree(), q = map.space_v().degree();
  const auto bu = map.space_u().breakpoints();
  const auto bv = map.space_v().breakpoints();
  std::vector<double> gx, gw_u, gy, gw_v;
  gauss_legendre(p + 1, gx, gw_u);
  gauss_legendre(q + 1, gy, gw_v);
  double area = 0.0;
  for (size_t su = 0; su + 1 < bu.size(); ++su) {
    const double hu = bu[su + 1] - bu[su];
    for (size_t sv = 0; sv + 1 < bv.size(); ++sv) {
      const double hv = bv[sv + 1] - bv[sv];
      for (int a = 0; a < p + 1; ++a)
        for (int b = 0; b < q + 1; ++b) {
          const double x = bu[su] + 0.5 * hu * (gx[a] + 1.0);
          const double y = bv[sv] + 0.5 * hv * (gy[b] + 1.0);
          area += 0.25 * hu * hv * gw_u[a] * gw_v[b] * map.jacobian(x, y);
        }
    }
  }
  return area;
}

TensorMap coons(const BoundaryCurves& boundary) {
  boundary.validate();
  const SplineSpace& su = boundary.space_u;
  const SplineSpace& sv = boundary.space_v;
  const int m = su.num_basis() - 1, n = sv.num_basis() - 1;
  const auto xi = su.greville();
  const auto eta = sv.greville();
  const Complex c00 = boundary.bottom.front(), cm0 = boundary.bottom.back();
  const Complex c0n = boundary.top.front(), cmn = boundary.top.back();
  Eigen::MatrixXcd c(m + 1, n + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      const double s = xi[i], t = eta[j];
      c(i, j) = (1.0 - s) * boundary.left[j] + s * boundary.right[j] +
                (1.0 - t) * boundary.bottom[i] + t * boundary.top[i] -
                ((1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * cm0 +
                 (1.0 - s) * t * c0n + s * t * cmn);
    }
  // Exact boundary rows/columns regardless of corner roundoff.
  for (int i = 0; i <= m; ++i) {
    c(i, 0) = boundary.bottom[i];
    c(i, n) = boundary.top[i];
  }
  for (int j = 0; j <= n; ++j) {
    c(0, j) = boundary.left[j];
    c(m, j) = boundary.right[j];
  }
  return TensorMap(su, sv, std::move(c));
}

TensorMap snap_boundary(const TensorMap& map, const BoundaryCurves& boundary) {
  boundary.validate();
  if (!(map.space_u() == boundary.space_u) ||
      !(map.space_v() == boundary.space_v))
    throw std::invalid_argument("snap_boundary: space mismatch");
  Eigen::MatrixXcd c = map.coeffs();
  const int m = map.m(), n = map.n();
  for (int i = 0; i <= m; ++i) {
    c(i, 0) = boundary.bottom[i];
    c(i, n) = boundary.top[i];
  }
  for (int j = 0; j <= n; ++j) {
    c(0, j) = boundary.left[j];
    c(m, j) = boundary.right[j];
  }
  return TensorMap(map.space_u(), map.space_v(), std::move(c));
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& C) {
  return Eigen::Map<const Eigen::VectorXcd>(C.data(), C.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& c, int m, int n) {
  if (c.size() != static_cast<Eigen::Index>((m + 1) * (n + 1)))
    throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Eigen::MatrixXcd>(c.data(), m + 1, n + 1);
}

}  // namespace lrqc
