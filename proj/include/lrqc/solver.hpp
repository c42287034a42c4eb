#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lrqc/assembly.hpp"
#include "lrqc/map.hpp"

namespace lrqc {

enum class PrecondKind { kJacobi, kIncompleteCholesky };

struct SolverConfig {
  double omega1 = 4.0;   // smoothness of the Beltrami field, typical [3, 5.5]
  double omega2 = 5.5;   // trace-norm weight, typical [4.5, 6]; 0 disables
  double omega3 = 100.0; // penalty coupling nu and mu(f)
  double lambda = 1000.0;
  double rho = 1.0;
  double eps = 1e-3;    // outer stopping threshold on the nu coefficients
  double eps0 = 0.05;   // switch to the reweighted fidelity below 1 + eps0
  double delta = 1e-4;  // guards the reweighting against division by zero
  int m = 24;           // map control net is (m+1) x (n+1)
  int n = 24;
  int m_tilde = 46;     // Beltrami field net is (m_tilde+1) x (n_tilde+1)
  int n_tilde = 46;
  int degree = 3;
  int admm_max_iters = 500;
  int outer_max_iters = 30;
  double admm_c_tol = 1e-7;  // relative to the boundary bounding box
  double pcg_tol = 1e-10;
  int pcg_max_iters = 2000;
  int quad_points = 0;  // 0 = degree + 1 per span
  int quality_grid = 200;
  double rank_tol = 1e-5;
  PrecondKind precond = PrecondKind::kIncompleteCholesky;
};

/// Primal/split/dual state of the ADMM iteration, all in vec_index order.
struct AdmmState {
  Eigen::VectorXcd c, z, eta;
  double rho = 1.0;
  int iteration = 0;
};

struct AdmmResult {
  Eigen::MatrixXcd C;
  int iterations = 0;
  double primal_residual = 0.0;  // ||c - z||
  double dual_residual = 0.0;    // rho ||z_t+1 - z_t||
  double c_change = 0.0;
  bool converged = false;
};

/// Complex tensor spline nu with every coefficient component strictly inside
/// (-sqrt(2)/2, sqrt(2)/2), so sup|nu| < 1 by convexity of the evaluation.
struct BeltramiField {
  SplineSpace space_u, space_v;
  Eigen::MatrixXcd coeffs;

  static BeltramiField zero(const SplineSpace& su, const SplineSpace& sv);
  Complex eval(double x, double y) const;
  void check_box() const;
};

struct ConvergenceRow {
  int iteration = 0;
  double sup_mu = 0.0;
  double min_jacobian = 0.0;
  int rank = 0;
  int admm_iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double nu_change = 0.0;
};

struct ConvergenceLog {
  std::vector<ConvergenceRow> rows;
  void write_csv(std::ostream& os) const;
};

struct ParamResult {
  TensorMap map;
  ConvergenceLog log;
  bool converged = false;
};

/// Minimize w2||Z||_* + w3 c^H Q c + lambda||Sel(c) - y||^2 by ADMM with the
/// split c = z; the c-step is a PCG solve of
/// (2 w3 Q + 2 lambda S^T S + rho I) c = rho z - eta + 2 lambda S^T y and the
/// Z-step is singular value thresholding at w2/rho. Stops when c changes by
/// less than admm_c_tol * scale in the sup norm and the split gap ||c - z||
/// has closed (or c is an exact fixed point of the c-step).
/// state (optional) carries the split variable and dual across calls: on
/// entry a size-matching state seeds z and eta (fresh calls start from
/// z = vec(init_c), eta = 0), on exit it holds the final iterates. Passing
/// the state of a previous solve of a nearby problem preserves the dual
/// information that plain restarts would rebuild over hundreds of iterations.
AdmmResult admm_solve(const FidelitySystem& fidelity,
                      const BoundarySelector& selector,
                      const SolverConfig& config,
                      const Eigen::MatrixXcd& init_c,
                      AdmmState* state = nullptr);

/// Solve the two real SPD systems of a NuSystem and project the coefficients
/// into the box.
BeltramiField solve_nu(const NuSystem& system, const SplineSpace& su,
                       const SplineSpace& sv, const SolverConfig& config);

/// The full alternating pipeline: Coons initialization, reweighted ADMM
/// fits of the map, Beltrami-field updates, boundary snap.
ParamResult parameterize(const BoundaryCurves& boundary,
                         const SolverConfig& config);

}  // namespace lrqc
