#pragma once

#include <Eigen/SparseCore>
#include <functional>

#include "lrqc/map.hpp"

namespace lrqc {

using ScalarFn = std::function<double(double, double)>;

/// Dirichlet-reduced Galerkin system of -laplace(u) + u = f on the image of
/// the map. A acts on the interior coefficients; lift carries the boundary
/// data (zero interior) over the full tensor basis.
struct GalerkinSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd lift;
  int dof = 0;
  SplineSpace space_u, space_v;
};

/// Scalar spline in parametric coordinates; composing with the map gives the
/// physical field without ever inverting the map.
struct ScalarField {
  SplineSpace space_u, space_v;
  Eigen::MatrixXd coeffs;

  double eval(double x, double y) const;
};

/// Pull-back assembly with the test/trial space equal to the map's space.
GalerkinSystem assemble(const TensorMap& map, const ScalarFn& f_source,
                        const ScalarFn& g_dirichlet);

/// Same, with an explicit (usually refined) discretization space.
GalerkinSystem assemble(const TensorMap& map, const SplineSpace& space_u,
                        const SplineSpace& space_v, const ScalarFn& f_source,
                        const ScalarFn& g_dirichlet);

ScalarField solve(const GalerkinSystem& system);

/// sqrt of the pulled-back integral of (u_h - u_exact)^2 over the domain.
double l2_error(const ScalarField& u_h, const TensorMap& map,
                const ScalarFn& u_exact);

/// lambda_max / lambda_min by power and pcg-based inverse power iteration,
/// each to 1e-4 relative.
double condition_estimate(const Eigen::SparseMatrix<double>& A);

/// Assembly through separable (rank-R) approximations of the four nodal
/// geometry factors; the matrix becomes a short sum of Kronecker products of
/// one-dimensional integrals. rhs and lift are left empty.
GalerkinSystem assemble_separable(const TensorMap& map, double tol);

}  // namespace lrqc
