#include "lrqc/assembly.hpp"

#include <stdexcept>
#include <vector>

namespace lrqc {

namespace {

void check_grid_tables(const QuadratureGrid& grid) {
  if (grid.bu.span.size() != grid.u.nodes.size() ||
      grid.bv.span.size() != grid.v.nodes.size())
    throw std::invalid_argument("quadrature grid tables out of sync");
}

}  // namespace

Eigen::MatrixXcd sample_field(const QuadratureGrid& grid,
                              const SplineSpace& su, const SplineSpace& sv,
                              const Eigen::MatrixXcd& coeffs) {
  const BasisCache cu = tabulate(su, grid.u.nodes);
  const BasisCache cv = tabulate(sv, grid.v.nodes);
  const int p = su.degree(), q = sv.degree();
  Eigen::MatrixXcd out(grid.u.num_nodes(), grid.v.num_nodes());
  for (int a = 0; a < grid.u.num_nodes(); ++a)
    for (int b = 0; b < grid.v.num_nodes(); ++b) {
      Complex v(0.0, 0.0);
      for (int j = 0; j <= q; ++j) {
        Complex row(0.0, 0.0);
        for (int i = 0; i <= p; ++i)
          row += coeffs(cu.span[a] - p + i, cv.span[b] - q + j) * cu.val(a, i);
        v += row * cv.val(b, j);
      }
      out(a, b) = v;
    }
  return out;
}

FidelitySystem build_fidelity(const QuadratureGrid& grid,
                              const Eigen::MatrixXcd& nu_nodes,
                              const Eigen::MatrixXd& omega) {
  check_grid_tables(grid);
  const int nu_count = grid.u.num_nodes(), nv_count = grid.v.num_nodes();
  if (nu_nodes.rows() != nu_count || nu_nodes.cols() != nv_count ||
      omega.rows() != nu_count || omega.cols() != nv_count)
    throw std::invalid_argument("build_fidelity: nodal table size mismatch");
  if (!nu_nodes.allFinite() || !omega.allFinite())
    throw std::invalid_argument("build_fidelity: non-finite nodal data");
  if ((omega.array() <= 0.0).any())
    throw std::invalid_argument("build_fidelity: omega must be positive");

  const int p = grid.bu.degree, q = grid.bv.degree;
  const int m1 = grid.bu.num_basis, n1 = grid.bv.num_basis;
  const int local = (p + 1) * (q + 1);
  const int ppu = grid.u.pts_per_span, ppv = grid.v.pts_per_span;
  const Complex iu(0.0, 1.0);

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<size_t>(grid.u.num_spans()) *
                   grid.v.num_spans() * local * local);
  Eigen::VectorXcd h(local);
  std::vector<int> glob(local);
  Eigen::MatrixXcd L(local, local);

  for (int cu = 0; cu < grid.u.num_spans(); ++cu) {
    for (int cv = 0; cv < grid.v.num_spans(); ++cv) {
      const int a0 = cu * ppu, b0 = cv * ppv;
      const int span_u = grid.bu.span[a0], span_v = grid.bv.span[b0];
      int l = 0;
      for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= p; ++i, ++l)
          glob[l] = vec_index(span_u - p + i, span_v - q + j, m1 - 1);
      L.setZero();
      for (int a = a0; a < a0 + ppu; ++a) {
        for (int b = b0; b < b0 + ppv; ++b) {
          const double w = grid.u.weights[a] * grid.v.weights[b] * omega(a, b);
          const Complex nu = nu_nodes(a, b);
          l = 0;
          for (int j = 0; j <= q; ++j)
            for (int i = 0; i <= p; ++i, ++l) {
              const double bx = grid.bu.der(a, i) * grid.bv.val(b, j);
              const double by = grid.bu.val(a, i) * grid.bv.der(b, j);
              const Complex Bz = 0.5 * (bx - iu * by);
              const Complex Bzbar = 0.5 * (bx + iu * by);
              h(l) = Bzbar - nu * Bz;
            }
          L.noalias() += w * (h.conjugate() * h.transpose());
        }
      }
      for (int k = 0; k < local; ++k)
        for (int l2 = 0; l2 < local; ++l2)
          triplets.emplace_back(glob[k], glob[l2], L(k, l2));
    }
  }
  FidelitySystem sys;
  sys.num_u = m1;
  sys.num_v = n1;
  sys.Q.resize(m1 * n1, m1 * n1);
  sys.Q.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

BoundarySelector build_boundary(const SplineSpace& space_u,
                                const SplineSpace& space_v,
                                const BoundaryCurves& boundary) {
  boundary.validate();
  if (!(space_u == boundary.space_u) || !(space_v == boundary.space_v))
    throw std::invalid_argument("build_boundary: space mismatch");
  const int m = space_u.num_basis() - 1, n = space_v.num_basis() - 1;
  BoundarySelector sel;
  sel.indices.reserve(2 * (m + n));
  std::vector<Complex> y;
  y.reserve(2 * (m + n));
  for (int i = 0; i <= m; ++i) {  // c00 .. cm0
    sel.indices.push_back(vec_index(i, 0, m));
    y.push_back(boundary.bottom[i]);
  }
  for (int j = 1; j <= n; ++j) {  // cm1 .. cmn
    sel.indices.push_back(vec_index(m, j, m));
    y.push_back(boundary.right[j]);
  }
  for (int i = m - 1; i >= 0; --i) {  // c(m-1)n .. c0n
    sel.indices.push_back(vec_index(i, n, m));
    y.push_back(boundary.top[i]);
  }
  for (int j = n - 1; j >= 1; --j) {  // c0(n-1) .. c01
    sel.indices.push_back(vec_index(0, j, m));
    y.push_back(boundary.left[j]);
  }
  sel.targets = Eigen::Map<const Eigen::VectorXcd>(y.data(), y.size());
  return sel;
}

void build_mass_stiffness(const QuadratureGrid& grid,
                          Eigen::SparseMatrix<double>& mass,
                          Eigen::SparseMatrix<double>& stiffness) {
  check_grid_tables(grid);
  const int p = grid.bu.degree, q = grid.bv.degree;
  const int m1 = grid.bu.num_basis, n1 = grid.bv.num_basis;
  const int local = (p + 1) * (q + 1);
  const int ppu = grid.u.pts_per_span, ppv = grid.v.pts_per_span;
  std::vector<Eigen::Triplet<double>> tm, tk;
  Eigen::VectorXd B(local), Bx(local), By(local);
  std::vector<int> glob(local);
  Eigen::MatrixXd Lm(local, local), Lk(local, local);
  for (int cu = 0; cu < grid.u.num_spans(); ++cu)
    for (int cv = 0; cv < grid.v.num_spans(); ++cv) {
      const int a0 = cu * ppu, b0 = cv * ppv;
      const int span_u = grid.bu.span[a0], span_v = grid.bv.span[b0];
      int l = 0;
      for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= p; ++i, ++l)
          glob[l] = vec_index(span_u - p + i, span_v - q + j, m1 - 1);
      Lm.setZero();
      Lk.setZero();
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
          Lm.noalias() += w * (B * B.transpose());
          Lk.noalias() += w * (Bx * Bx.transpose() + By * By.transpose());
        }
      for (int k = 0; k < local; ++k)
        for (int l2 = 0; l2 < local; ++l2) {
          tm.emplace_back(glob[k], glob[l2], Lm(k, l2));
          tk.emplace_back(glob[k], glob[l2], Lk(k, l2));
        }
    }
  mass.resize(m1 * n1, m1 * n1);
  stiffness.resize(m1 * n1, m1 * n1);
  mass.setFromTriplets(tm.begin(), tm.end());
  stiffness.setFromTriplets(tk.begin(), tk.end());
}

NuSystem build_nu_system(const QuadratureGrid& grid,
                         const Eigen::MatrixXcd& mu_nodes,
                         const Eigen::Matrix<bool, Eigen::Dynamic,
                                             Eigen::Dynamic>& active,
                         double omega1, double omega3) {
  check_grid_tables(grid);
  if (omega1 < 0.0) throw std::invalid_argument("build_nu_system: omega1 < 0");
  if (omega3 <= 0.0) throw std::invalid_argument("build_nu_system: omega3 <= 0");
  const int nu_count = grid.u.num_nodes(), nv_count = grid.v.num_nodes();
  if (mu_nodes.rows() != nu_count || mu_nodes.cols() != nv_count ||
      active.rows() != nu_count || active.cols() != nv_count)
    throw std::invalid_argument("build_nu_system: nodal table size mismatch");
  for (int a = 0; a < nu_count; ++a)
    for (int b = 0; b < nv_count; ++b)
      if (active(a, b) && !std::isfinite(std::abs(mu_nodes(a, b))))
        throw std::invalid_argument("build_nu_system: non-finite active mu");

  const int p = grid.bu.degree, q = grid.bv.degree;
  const int m1 = grid.bu.num_basis, n1 = grid.bv.num_basis;
  const int local = (p + 1) * (q + 1);
  const int ppu = grid.u.pts_per_span, ppv = grid.v.pts_per_span;

  std::vector<Eigen::Triplet<double>> th;
  Eigen::VectorXd B(local), Bx(local), By(local);
  std::vector<int> glob(local);
  Eigen::MatrixXd L(local, local);
  NuSystem sys;
  sys.num_u = m1;
  sys.num_v = n1;
  sys.rhs_re = Eigen::VectorXd::Zero(m1 * n1);
  sys.rhs_im = Eigen::VectorXd::Zero(m1 * n1);

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
          const bool on = active(a, b);
          l = 0;
          for (int j = 0; j <= q; ++j)
            for (int i = 0; i <= p; ++i, ++l) {
              B(l) = grid.bu.val(a, i) * grid.bv.val(b, j);
              Bx(l) = grid.bu.der(a, i) * grid.bv.val(b, j);
              By(l) = grid.bu.val(a, i) * grid.bv.der(b, j);
            }
          const double wm = on ? w * (1.0 + omega3) : w;
          L.noalias() += wm * (B * B.transpose());
          L.noalias() += (w * omega1) * (Bx * Bx.transpose() + By * By.transpose());
          if (on) {
            const Complex mu = mu_nodes(a, b);
            for (int k = 0; k < local; ++k) {
              sys.rhs_re(glob[k]) += omega3 * w * B(k) * mu.real();
              sys.rhs_im(glob[k]) += omega3 * w * B(k) * mu.imag();
            }
          }
        }
      for (int k = 0; k < local; ++k)
        for (int l2 = 0; l2 < local; ++l2)
          th.emplace_back(glob[k], glob[l2], L(k, l2));
    }
  sys.H.resize(m1 * n1, m1 * n1);
  sys.H.setFromTriplets(th.begin(), th.end());
  return sys;
}

}  // namespace lrqc
