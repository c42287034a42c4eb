#include "lrqc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrqc {

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    // The Chebyshev guesses run right to left; store ascending.
    nodes[n - 1 - i] = t;
    weights[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

namespace {

std::vector<double> merged_breakpoints(const SplineSpace& space,
                                       const std::vector<double>& extra) {
  std::vector<double> bp = space.breakpoints();
  bp.insert(bp.end(), extra.begin(), extra.end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-14; }),
           bp.end());
  if (bp.front() < 0.0 || bp.back() > 1.0)
    throw std::invalid_argument("breakpoints outside [0,1]");
  return bp;
}

DirRule build_dir_rule(std::vector<double> bp, int pts) {
  std::vector<double> gx, gw;
  gauss_legendre(pts, gx, gw);
  DirRule rule;
  rule.breakpoints = std::move(bp);
  rule.pts_per_span = pts;
  for (size_t s = 0; s + 1 < rule.breakpoints.size(); ++s) {
    const double a = rule.breakpoints[s], b = rule.breakpoints[s + 1];
    const double h = b - a;
    for (int k = 0; k < pts; ++k) {
      rule.nodes.push_back(a + 0.5 * h * (gx[k] + 1.0));
      rule.weights.push_back(0.5 * h * gw[k]);
    }
  }
  return rule;
}

}  // namespace

BasisCache tabulate(const SplineSpace& space, const std::vector<double>& nodes) {
  const int p = space.degree();
  BasisCache cache;
  cache.degree = p;
  cache.num_basis = space.num_basis();
  cache.span.resize(nodes.size());
  cache.val.resize(nodes.size(), p + 1);
  cache.der.resize(nodes.size(), p + 1);
  Eigen::MatrixXd ders;
  for (size_t k = 0; k < nodes.size(); ++k) {
    cache.span[k] = space.eval_basis_derivatives(nodes[k], 1, ders);
    cache.val.row(k) = ders.row(0);
    cache.der.row(k) = ders.row(1);
  }
  return cache;
}

QuadratureGrid build_quadrature(const SplineSpace& space_u,
                                const SplineSpace& space_v,
                                int points_per_span,
                                const std::vector<double>& extra_u,
                                const std::vector<double>& extra_v) {
  QuadratureGrid grid;
  const int pu = points_per_span > 0 ? points_per_span : space_u.degree() + 1;
  const int pv = points_per_span > 0 ? points_per_span : space_v.degree() + 1;
  grid.u = build_dir_rule(merged_breakpoints(space_u, extra_u), pu);
  grid.v = build_dir_rule(merged_breakpoints(space_v, extra_v), pv);
  grid.bu = tabulate(space_u, grid.u.nodes);
  grid.bv = tabulate(space_v, grid.v.nodes);
  return grid;
}

}  // namespace lrqc
