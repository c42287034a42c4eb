#include "lrqc/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "lrqc/lowrank.hpp"
#include "lrqc/quadrature.hpp"

namespace lrqc {

namespace {

void check_grid_n(int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("quality grid must be >= 2");
}

// Cell centers: corners of the parameter square map to boundary points where
// the image angle is pi, so J vanishes there by construction and the exact
// corner sample would only report that geometric fact.
double sample_coord(int k, int grid_n) {
  return (k + 0.5) / grid_n;
}

/// Gauss integral of the Jacobian over [a,b]x[c,d], split at the map knots.
double cell_jacobian_integral(const TensorMap& map, double a, double b,
                              double c, double d) {
  const auto segments = [](const std::vector<double>& bp, double lo,
                           double hi) {
    std::vector<double> s{lo};
    for (double t : bp)
      if (t > lo + 1e-14 && t < hi - 1e-14) s.push_back(t);
    s.push_back(hi);
    return s;
  };
  const std::vector<double> su = segments(map.space_u().breakpoints(), a, b);
  const std::vector<double> sv = segments(map.space_v().breakpoints(), c, d);
  const int pts_u = map.space_u().degree() + 1;
  const int pts_v = map.space_v().degree() + 1;
  std::vector<double> gxu, gwu, gxv, gwv;
  gauss_legendre(pts_u, gxu, gwu);
  gauss_legendre(pts_v, gxv, gwv);
  double total = 0.0;
  for (size_t i = 0; i + 1 < su.size(); ++i)
    for (size_t j = 0; j + 1 < sv.size(); ++j) {
      const double hu = su[i + 1] - su[i], hv = sv[j + 1] - sv[j];
      for (int ku = 0; ku < pts_u; ++ku)
        for (int kv = 0; kv < pts_v; ++kv) {
          const double x = su[i] + 0.5 * hu * (gxu[ku] + 1.0);
          const double y = sv[j] + 0.5 * hv * (gxv[kv] + 1.0);
          total += 0.25 * hu * hv * gwu[ku] * gwv[kv] * map.jacobian(x, y);
        }
    }
  return total;
}

}  // namespace

double sample_sup_mu(const TensorMap& map, int grid_n) {
  check_grid_n(grid_n);
  double sup = 0.0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double x = sample_coord(i, grid_n), y = sample_coord(j, grid_n);
      if (map.degenerate_at(x, y)) continue;
      sup = std::max(sup, std::abs(map.beltrami(x, y)));
    }
  return sup;
}

std::pair<double, double> scaled_jacobian_extrema(const TensorMap& map,
                                                  int grid_n) {
  check_grid_n(grid_n);
  const double area = domain_area(map);
  if (area == 0.0) throw std::runtime_error("map has zero area");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double js =
          map.jacobian(sample_coord(i, grid_n), sample_coord(j, grid_n)) /
          area;
      lo = std::min(lo, js);
      hi = std::max(hi, js);
    }
  return {lo, hi};
}

Eigen::MatrixXd cell_area_distortion(const TensorMap& map, int M, int N) {
  if (M < 1 || N < 1)
    throw std::invalid_argument("cell_area_distortion: M, N must be >= 1");
  const double area = domain_area(map);
  if (area == 0.0) throw std::runtime_error("map has zero area");
  Eigen::MatrixXd out(M, N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) {
      const double a = static_cast<double>(i) / M;
      const double b = static_cast<double>(i + 1) / M;
      const double c = static_cast<double>(j) / N;
      const double d = static_cast<double>(j + 1) / N;
      // (integral of J_s over the cell) / cell area = M*N*integral(J)/area
      out(i, j) = M * N * cell_jacobian_integral(map, a, b, c, d) / area;
    }
  return out;
}

InjectivityResult injectivity_check(const TensorMap& map, int grid_n) {
  check_grid_n(grid_n);
  InjectivityResult r;
  r.min_jacobian = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double x = sample_coord(i, grid_n), y = sample_coord(j, grid_n);
      if (map.degenerate_at(x, y)) ++r.degenerate_count;
      r.min_jacobian = std::min(r.min_jacobian, map.jacobian(x, y));
    }
  r.is_locally_injective = r.min_jacobian > 0.0 && r.degenerate_count == 0;
  return r;
}

QualityReport make_report(const TensorMap& map, int grid_n, int cells_m,
                          int cells_n, double rank_tol) {
  QualityReport rep;
  rep.grid_n = grid_n;
  rep.sup_mu = sample_sup_mu(map, grid_n);
  const auto [lo, hi] = scaled_jacobian_extrema(map, grid_n);
  rep.min_scaled_jac = lo;
  rep.max_scaled_jac = hi;
  rep.cell_area_distortion = cell_area_distortion(map, cells_m, cells_n);
  rep.numerical_rank = numerical_rank(map.coeffs(), rank_tol);
  const InjectivityResult inj = injectivity_check(map, grid_n);
  rep.degenerate_count = inj.degenerate_count;
  rep.locally_injective = inj.is_locally_injective;
  return rep;
}

void QualityReport::write_keyvalue(std::ostream& os) const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sup_mu=%.12g\n", sup_mu);
  os << buf;
  std::snprintf(buf, sizeof(buf), "min_scaled_jac=%.12g\n", min_scaled_jac);
  os << buf;
  std::snprintf(buf, sizeof(buf), "max_scaled_jac=%.12g\n", max_scaled_jac);
  os << buf;
  os << "numerical_rank=" << numerical_rank << "\n";
  os << "grid_n=" << grid_n << "\n";
  os << "degenerate_count=" << degenerate_count << "\n";
  os << "locally_injective=" << (locally_injective ? 1 : 0) << "\n";
}

void QualityReport::write_cell_csv(std::ostream& os) const {
  os << cell_area_distortion.rows() << "," << cell_area_distortion.cols()
     << ",cell_area_distortion\n";
  char buf[64];
  for (Eigen::Index i = 0; i < cell_area_distortion.rows(); ++i)
    for (Eigen::Index j = 0; j < cell_area_distortion.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", cell_area_distortion(i, j));
      os << buf << (j + 1 < cell_area_distortion.cols() ? ',' : '\n');
    }
}

}  // namespace lrqc
