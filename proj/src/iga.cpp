#include "lrqc/iga.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lrqc/lowrank.hpp"
#include "lrqc/pcg.hpp"
#include "lrqc/quadrature.hpp"

namespace lrqc {

namespace {

/// Per-node pulled-back geometry: G = detJ * J^-1 J^-T and the measure detJ.
struct GeometryTables {
  Eigen::MatrixXd g11, g12, g22, det;
  Eigen::MatrixXd phys_x, phys_y;
};

GeometryTables geometry_at_nodes(const TensorMap& map,
                                 const QuadratureGrid& grid) {
  const BasisCache cu = tabulate(map.space_u(), grid.u.nodes);
  const BasisCache cv = tabulate(map.space_v(), grid.v.nodes);
  const int p = cu.degree, q = cv.degree;
  const int na = grid.u.num_nodes(), nb = grid.v.num_nodes();
  GeometryTables t;
  t.g11.resize(na, nb);
  t.g12.resize(na, nb);
  t.g22.resize(na, nb);
  t.det.resize(na, nb);
  t.phys_x.resize(na, nb);
  t.phys_y.resize(na, nb);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) {
      Complex f(0, 0), fu(0, 0), fv(0, 0);
      for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= p; ++i) {
          const Complex c =
              map.coeffs()(cu.span[a] - p + i, cv.span[b] - q + j);
          f += c * (cu.val(a, i) * cv.val(b, j));
          fu += c * (cu.der(a, i) * cv.val(b, j));
          fv += c * (cu.val(a, i) * cv.der(b, j));
        }
      const double xu = fu.real(), yu = fu.imag();
      const double xv = fv.real(), yv = fv.imag();
      const double det = xu * yv - xv * yu;
      if (det <= 0.0)
        throw std::runtime_error(
            "assemble: non-positive Jacobian at a quadrature node");
      t.det(a, b) = det;
      t.g11(a, b) = (xv * xv + yv * yv) / det;
      t.g12(a, b) = -(xu * xv + yu * yv) / det;
      t.g22(a, b) = (xu * xu + yu * yu) / det;
      t.phys_x(a, b) = f.real();
      t.phys_y(a, b) = f.imag();
    }
  return t;
}

/// Solve the 1D Greville interpolation problem of a clamped space.
Eigen::VectorXd greville_collocate(const SplineSpace& space,
                                   const Eigen::VectorXd& values) {
  const int n = space.num_basis();
  const int p = space.degree();
  const std::vector<double> g = space.greville();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> vals(p + 1);
  for (int k = 0; k < n; ++k) {
    const int span = space.eval_basis(g[k], vals.data());
    for (int i = 0; i <= p; ++i) B(k, span - p + i) = vals[i];
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(values);
}

Eigen::MatrixXd boundary_lift(const TensorMap& map, const SplineSpace& su,
                              const SplineSpace& sv,
                              const ScalarFn& g_dirichlet) {
  const int m1 = su.num_basis(), n1 = sv.num_basis();
  const std::vector<double> gu = su.greville(), gv = sv.greville();
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(m1, n1);
  Eigen::VectorXd vb(m1), vt(m1), vl(n1), vr(n1);
  for (int k = 0; k < m1; ++k) {
    const Complex zb = map.eval(gu[k], 0.0), zt = map.eval(gu[k], 1.0);
    vb(k) = g_dirichlet(zb.real(), zb.imag());
    vt(k) = g_dirichlet(zt.real(), zt.imag());
  }
  for (int k = 0; k < n1; ++k) {
    const Complex zl = map.eval(0.0, gv[k]), zr = map.eval(1.0, gv[k]);
    vl(k) = g_dirichlet(zl.real(), zl.imag());
    vr(k) = g_dirichlet(zr.real(), zr.imag());
  }
  lift.col(0) = greville_collocate(su, vb);
  lift.col(n1 - 1) = greville_collocate(su, vt);
  lift.row(0) = greville_collocate(sv, vl).transpose();
  lift.row(m1 - 1) = greville_collocate(sv, vr).transpose();
  return lift;
}

int interior_index(int i, int j, int m1) { return (j - 1) * (m1 - 2) + (i - 1); }

Eigen::SparseMatrix<double> interior_block(
    const Eigen::SparseMatrix<double>& full, int m1, int n1) {
  const int dof = (m1 - 2) * (n1 - 2);
  std::vector<Eigen::Triplet<double>> tri;
  for (int col = 0; col < full.outerSize(); ++col) {
    const int jc = col / m1, ic = col % m1;
    if (ic < 1 || ic > m1 - 2 || jc < 1 || jc > n1 - 2) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
      const int jr = static_cast<int>(it.row()) / m1;
      const int ir = static_cast<int>(it.row()) % m1;
      if (ir < 1 || ir > m1 - 2 || jr < 1 || jr > n1 - 2) continue;
      tri.emplace_back(interior_index(ir, jr, m1), interior_index(ic, jc, m1),
                       it.value());
    }
  }
  Eigen::SparseMatrix<double> A(dof, dof);
  A.setFromTriplets(tri.begin(), tri.end());
  return A;
}

}  // namespace

double ScalarField::eval(double x, double y) const {
  const int p = space_u.degree(), q = space_v.degree();
  std::vector<double> mu(p + 1), nv(q + 1);
  const int si = space_u.eval_basis(x, mu.data());
  const int sj = space_v.eval_basis(y, nv.data());
  double out = 0.0;
  for (int j = 0; j <= q; ++j) {
    double row = 0.0;
    for (int i = 0; i <= p; ++i) row += coeffs(si - p + i, sj - q + j) * mu[i];
    out += row * nv[j];
  }
  return out;
}

GalerkinSystem assemble(const TensorMap& map, const ScalarFn& f_source,
                        const ScalarFn& g_dirichlet) {
  return assemble(map, map.space_u(), map.space_v(), f_source, g_dirichlet);
}

GalerkinSystem assemble(const TensorMap& map, const SplineSpace& space_u,
                        const SplineSpace& space_v, const ScalarFn& f_source,
                        const ScalarFn& g_dirichlet) {
  const int m1 = space_u.num_basis(), n1 = space_v.num_basis();
  if (m1 < 3 || n1 < 3)
    throw std::invalid_argument("assemble: no interior degrees of freedom");
  const QuadratureGrid grid =
      build_quadrature(space_u, space_v, 0, map.space_u().breakpoints(),
                       map.space_v().breakpoints());
  const GeometryTables geo = geometry_at_nodes(map, grid);

  const int p = grid.bu.degree, q = grid.bv.degree;
  const int local = (p + 1) * (q + 1);
  const int ppu = grid.u.pts_per_span, ppv = grid.v.pts_per_span;
  const int N = m1 * n1;

  std::vector<Eigen::Triplet<double>> tri;
  Eigen::VectorXd F = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd B(local), Bx(local), By(local);
  std::vector<int> glob(local);
  Eigen::MatrixXd L(local, local);

  for (int cu = 0; cu < grid.u.num_spans(); ++cu)
    for (int cv = 0; cv < grid.v.num_spans(); ++cv) {
      const int a0 = cu * ppu, b0 = cv * ppv;
      const int span_u = grid.bu.span[a0], span_v = grid.bv.span[b0];
      int l = 0;
      for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= p; ++i, ++l)
          glob[l] = vec_index(span_u - p + i, span_v - q + j, m1 - 1);
      L.setZero();
      for (int a = a0; a < a0 + ppu; ++a)
        for (int b = b0; b < b0 + ppv; ++b) {
          const double w = grid.u.weights[a] * grid.v.weights[b];
          l = 0;
          for (int j = 0; j <= q; ++j)
            for (int i = 0; i <= p; ++i, ++l) {
              B(l) = grid.bu.val(a, i) * grid.bv.val(b, j);
              Bx(l) = grid.bu.der(a, i) * grid.bv.val(b, j);
              By(l) = grid.bu.val(a, i) * grid.bv.der(b, j);
            }
          L.noalias() += (w * geo.g11(a, b)) * (Bx * Bx.transpose());
          L.noalias() += (w * geo.g12(a, b)) *
                         (Bx * By.transpose() + By * Bx.transpose());
          L.noalias() += (w * geo.g22(a, b)) * (By * By.transpose());
          L.noalias() += (w * geo.det(a, b)) * (B * B.transpose());
          const double fval =
              w * geo.det(a, b) * f_source(geo.phys_x(a, b), geo.phys_y(a, b));
          for (int k = 0; k < local; ++k) F(glob[k]) += fval * B(k);
        }
      for (int k = 0; k < local; ++k)
        for (int l2 = 0; l2 < local; ++l2)
          tri.emplace_back(glob[k], glob[l2], L(k, l2));
    }
  Eigen::SparseMatrix<double> full(N, N);
  full.setFromTriplets(tri.begin(), tri.end());

  GalerkinSystem sys;
  sys.space_u = space_u;
  sys.space_v = space_v;
  sys.lift = boundary_lift(map, space_u, space_v, g_dirichlet);
  sys.dof = (m1 - 2) * (n1 - 2);
  sys.A = interior_block(full, m1, n1);

  Eigen::VectorXd lift_vec(N);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < m1; ++i)
      lift_vec(vec_index(i, j, m1 - 1)) = sys.lift(i, j);
  const Eigen::VectorXd resid = F - full * lift_vec;
  sys.rhs.resize(sys.dof);
  for (int j = 1; j <= n1 - 2; ++j)
    for (int i = 1; i <= m1 - 2; ++i)
      sys.rhs(interior_index(i, j, m1)) = resid(vec_index(i, j, m1 - 1));
  return sys;
}

ScalarField solve(const GalerkinSystem& system) {
  const int m1 = system.space_u.num_basis(), n1 = system.space_v.num_basis();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(system.dof);
  if (system.rhs.size() != system.dof)
    throw std::invalid_argument("solve: rhs size mismatch");
  const JacobiPreconditioner<double> precond(system.A);
  const auto apply_A = [&](const Eigen::VectorXd& x) {
    return (system.A * x).eval();
  };
  const PcgResult pr =
      pcg(apply_A, system.rhs, w, precond, 1e-12, 50 * system.dof + 1000);
  if (!pr.converged)
    throw std::runtime_error("solve: pcg stalled, relative residual " +
                             std::to_string(pr.relative_residual));
  ScalarField u;
  u.space_u = system.space_u;
  u.space_v = system.space_v;
  u.coeffs = system.lift;
  for (int j = 1; j <= n1 - 2; ++j)
    for (int i = 1; i <= m1 - 2; ++i)
      u.coeffs(i, j) += w(interior_index(i, j, m1));
  return u;
}

double l2_error(const ScalarField& u_h, const TensorMap& map,
                const ScalarFn& u_exact) {
  const int extra =
      std::max(u_h.space_u.degree(), u_h.space_v.degree()) + 3;
  const QuadratureGrid grid =
      build_quadrature(u_h.space_u, u_h.space_v, extra,
                       map.space_u().breakpoints(), map.space_v().breakpoints());
  double acc = 0.0;
  for (int a = 0; a < grid.u.num_nodes(); ++a)
    for (int b = 0; b < grid.v.num_nodes(); ++b) {
      const double x = grid.u.nodes[a], y = grid.v.nodes[b];
      const Complex z = map.eval(x, y);
      const double d = u_h.eval(x, y) - u_exact(z.real(), z.imag());
      acc += grid.u.weights[a] * grid.v.weights[b] * d * d *
             map.jacobian(x, y);
    }
  return std::sqrt(std::max(acc, 0.0));
}

double condition_estimate(const Eigen::SparseMatrix<double>& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) throw std::invalid_argument("condition_estimate: empty matrix");
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  x.normalize();

  double lmax = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd y = A * x;
    const double l = x.dot(y);
    const bool done = it > 2 && std::abs(l - lmax) <= 1e-4 * std::abs(l);
    lmax = l;
    x = y / y.norm();
    if (done) break;
  }

  const JacobiPreconditioner<double> precond(A);
  const auto apply_A = [&](const Eigen::VectorXd& v) {
    return (A * v).eval();
  };
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  x.normalize();
  double inv_l = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    pcg(apply_A, x, z, precond, 1e-10, 100 * n + 1000);
    const double l = x.dot(z);
    const bool done = it > 2 && std::abs(l - inv_l) <= 1e-4 * std::abs(l);
    inv_l = l;
    x = z / z.norm();
    if (done) break;
  }
  if (inv_l <= 0.0)
    throw std::runtime_error("condition_estimate: matrix not PD");
  return lmax * inv_l;
}

GalerkinSystem assemble_separable(const TensorMap& map, double tol) {
  const SplineSpace& su = map.space_u();
  const SplineSpace& sv = map.space_v();
  const int m1 = su.num_basis(), n1 = sv.num_basis();
  const QuadratureGrid grid = build_quadrature(su, sv);
  const GeometryTables geo = geometry_at_nodes(map, grid);

  // 1D weighted Gram matrix: entries sum_a w_a q(a) D^dk B_i(a) D^dl B_j(a).
  const auto one_d = [](const DirRule& rule, const BasisCache& cache,
                        const Eigen::VectorXcd& nodal, bool dk, bool dl) {
    const int nbasis = cache.num_basis, p = cache.degree;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(nbasis, nbasis);
    for (int a = 0; a < rule.num_nodes(); ++a) {
      const Complex w = rule.weights[a] * nodal(a);
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) {
          const double vi = dk ? cache.der(a, i) : cache.val(a, i);
          const double vj = dl ? cache.der(a, j) : cache.val(a, j);
          M(cache.span[a] - p + i, cache.span[a] - p + j) += w * vi * vj;
        }
    }
    return M;
  };

  const int N = m1 * n1;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(N, N);
  const auto add_kron = [&](const Eigen::MatrixXcd& Av,
                            const Eigen::MatrixXcd& Au) {
    for (int jc = 0; jc < n1; ++jc)
      for (int jr = 0; jr < n1; ++jr) {
        const Complex avv = Av(jr, jc);
        if (avv == Complex(0, 0)) continue;
        for (int ic = 0; ic < m1; ++ic)
          for (int ir = 0; ir < m1; ++ir)
            full(vec_index(ir, jr, m1 - 1), vec_index(ic, jc, m1 - 1)) +=
                avv * Au(ir, ic);
      }
  };

  // Each geometry factor becomes sum_r sigma_r u_r(x) conj(v_r)(y); the
  // 2D integral then splits into products of 1D integrals.
  const auto accumulate = [&](const Eigen::MatrixXd& factor, bool du_k,
                              bool du_l, bool dv_k, bool dv_l,
                              bool symmetrize) {
    const SeparableForm form =
        separable_terms(factor.cast<Complex>(), tol);
    for (const SeparableTerm& t : form.terms) {
      const Eigen::VectorXcd wu = t.sigma * t.u;
      const Eigen::VectorXcd wv = t.v.conjugate();
      const Eigen::MatrixXcd Au = one_d(grid.u, grid.bu, wu, du_k, du_l);
      const Eigen::MatrixXcd Av = one_d(grid.v, grid.bv, wv, dv_k, dv_l);
      add_kron(Av, Au);
      if (symmetrize) add_kron(Av.transpose(), Au.transpose());
    }
  };
  accumulate(geo.g11, true, true, false, false, false);
  accumulate(geo.g22, false, false, true, true, false);
  accumulate(geo.g12, true, false, false, true, true);
  accumulate(geo.det, false, false, false, false, false);

  GalerkinSystem sys;
  sys.space_u = su;
  sys.space_v = sv;
  sys.dof = (m1 - 2) * (n1 - 2);
  sys.lift = Eigen::MatrixXd::Zero(m1, n1);
  sys.rhs = Eigen::VectorXd::Zero(sys.dof);
  Eigen::SparseMatrix<double> full_sparse =
      full.real().sparseView(1.0, 1e-300);
  sys.A = interior_block(full_sparse, m1, n1);
  return sys;
}

}  // namespace lrqc
