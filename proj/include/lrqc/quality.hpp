#pragma once

#include <iosfwd>

#include "lrqc/map.hpp"

namespace lrqc {

/// Sampled distortion, injectivity, and rank diagnostics of a map.
struct QualityReport {
  double sup_mu = 0.0;
  double min_scaled_jac = 0.0;
  double max_scaled_jac = 0.0;
  Eigen::MatrixXd cell_area_distortion;
  int numerical_rank = 0;
  int grid_n = 0;
  int degenerate_count = 0;
  bool locally_injective = false;

  void write_keyvalue(std::ostream& os) const;
  void write_cell_csv(std::ostream& os) const;
};

struct InjectivityResult {
  bool is_locally_injective = false;
  double min_jacobian = 0.0;
  int degenerate_count = 0;
};

/// max |mu| over a uniform grid_n x grid_n sample grid (cell centers);
/// degenerate points (|f_z| under tolerance) are skipped.
double sample_sup_mu(const TensorMap& map, int grid_n);

/// Extrema of J/area over the same uniform grid.
std::pair<double, double> scaled_jacobian_extrema(const TensorMap& map,
                                                  int grid_n);

/// Per-cell integral of the scaled Jacobian divided by the cell area
/// 1/(M N), on the uniform M x N subdivision of the unit square. Cell
/// integrals split at the map's knots, so the quadrature is exact.
Eigen::MatrixXd cell_area_distortion(const TensorMap& map, int M, int N);

InjectivityResult injectivity_check(const TensorMap& map, int grid_n);

QualityReport make_report(const TensorMap& map, int grid_n, int cells_m,
                          int cells_n, double rank_tol);

}  // namespace lrqc
