#pragma once

#include <Eigen/Core>
#include <vector>

#include "lrqc/spline.hpp"

namespace lrqc {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// One direction of a tensor quadrature grid: Gauss points per span,
/// flattened span by span.
struct DirRule {
  std::vector<double> breakpoints;  // span boundaries, ascending
  std::vector<double> nodes;        // size = spans * pts_per_span
  std::vector<double> weights;      // same layout; sums to 1 over [0,1]
  int pts_per_span = 0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_spans() const { return static_cast<int>(breakpoints.size()) - 1; }
};

/// Cached basis values and first derivatives of a spline space at all nodes
/// of a DirRule. Row k of val/der holds the degree+1 nonzero functions at
/// node k; span[k] locates them.
struct BasisCache {
  int degree = 0;
  int num_basis = 0;
  std::vector<int> span;
  Eigen::MatrixXd val;
  Eigen::MatrixXd der;
};

/// Tensor quadrature grid over the unit square with cached tables for the
/// two spaces it was built from. 2D node (a, b) has combined weight
/// u.weights[a] * v.weights[b]; flattened node index = a * v.num_nodes() + b.
struct QuadratureGrid {
  DirRule u, v;
  BasisCache bu, bv;
};

/// Spans from the given spaces' knots, optionally refined by extra
/// breakpoints (e.g. the knots of a second space sharing the direction).
/// points_per_span defaults to degree+1 when 0 is passed.
QuadratureGrid build_quadrature(const SplineSpace& space_u,
                                const SplineSpace& space_v,
                                int points_per_span = 0,
                                const std::vector<double>& extra_u = {},
                                const std::vector<double>& extra_v = {});

BasisCache tabulate(const SplineSpace& space, const std::vector<double>& nodes);

}  // namespace lrqc
