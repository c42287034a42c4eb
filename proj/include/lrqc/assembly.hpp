#pragma once

#include <Eigen/SparseCore>

#include "lrqc/map.hpp"
#include "lrqc/quadrature.hpp"

namespace lrqc {

/// Hermitian PSD form with c^H Q c = integral of omega |f_zbar - nu f_z|^2
/// over the quadrature grid, in the vectorization order of vec_index().
struct FidelitySystem {
  Eigen::SparseMatrix<Complex> Q;
  int num_u = 0;  // basis counts of the map spaces
  int num_v = 0;
};

/// The 2(m+n) boundary positions of the coefficient matrix in the traversal
/// c00..cm0, cm1..cmn, c(m-1)n..c0n, c0(n-1)..c01, with their target values.
struct BoundarySelector {
  std::vector<int> indices;
  Eigen::VectorXcd targets;
};

/// Mass/stiffness system of the auxiliary Beltrami field: H = (1+w3) M + w1 K
/// with the w3 part and the right-hand side restricted to active nodes.
/// The complex problem decouples into two identical real SPD solves.
struct NuSystem {
  Eigen::SparseMatrix<double> H;
  Eigen::VectorXd rhs_re, rhs_im;
  int num_u = 0;
  int num_v = 0;
};

/// Nodal values of a complex tensor spline on the grid, indexed (u node,
/// v node).
Eigen::MatrixXcd sample_field(const QuadratureGrid& grid,
                              const SplineSpace& su, const SplineSpace& sv,
                              const Eigen::MatrixXcd& coeffs);

/// grid must be built for the map spaces; nu_nodes and omega are per-node
/// tables of the Beltrami target and the fidelity weight (omega = 1 outside
/// the post-processing phase).
FidelitySystem build_fidelity(const QuadratureGrid& grid,
                              const Eigen::MatrixXcd& nu_nodes,
                              const Eigen::MatrixXd& omega);

BoundarySelector build_boundary(const SplineSpace& space_u,
                                const SplineSpace& space_v,
                                const BoundaryCurves& boundary);

/// grid must be built for the field spaces. active(a,b) = false drops the
/// node from the data term (degenerate map points); the mass part from the
/// plain |nu|^2 term keeps H positive definite either way.
NuSystem build_nu_system(const QuadratureGrid& grid,
                         const Eigen::MatrixXcd& mu_nodes,
                         const Eigen::Matrix<bool, Eigen::Dynamic,
                                             Eigen::Dynamic>& active,
                         double omega1, double omega3);

/// 2D mass and gradient-stiffness matrices of the grid's spaces; used by the
/// nu system and exposed for tests.
void build_mass_stiffness(const QuadratureGrid& grid,
                          Eigen::SparseMatrix<double>& mass,
                          Eigen::SparseMatrix<double>& stiffness);

}  // namespace lrqc
