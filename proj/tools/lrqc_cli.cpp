#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lrqc/domain_io.hpp"
#include "lrqc/iga.hpp"
#include "lrqc/lowrank.hpp"
#include "lrqc/quality.hpp"
#include "lrqc/solver.hpp"

namespace {

using namespace lrqc;

struct PdePreset {
  ScalarFn exact;
  ScalarFn source;  // f = -laplace(u) + u
};

PdePreset make_preset(const std::string& name) {
  if (name == "rational-bump") {
    // u = 1.0/((x-0.5)^2+(y-0.5)^2+0.02)
    const auto u = [](double x, double y) {
      const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
      return 1.0 / (r2 + 0.02);
    };
    const auto f = [u](double x, double y) {
      const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
      const double D = r2 + 0.02;
      const double lap = -4.0 / (D * D) + 8.0 * r2 / (D * D * D);
      return -lap + u(x, y);
    };
    return {u, f};
  }
  if (name == "tanh-front") {
    // u = tanh((0.25-sqrt((x-0.5)^2+(y-0.5)^2))/0.03)
    const auto u = [](double x, double y) {
      const double r = std::hypot(x - 0.5, y - 0.5);
      return std::tanh((0.25 - r) / 0.03);
    };
    const auto f = [u](double x, double y) {
      const double r = std::max(std::hypot(x - 0.5, y - 0.5), 1e-12);
      const double t = u(x, y);
      const double sech2 = 1.0 - t * t;
      const double lap =
          (-2.0 * t * sech2) / (0.03 * 0.03) - sech2 / (0.03 * r);
      return -lap + t;
    };
    return {u, f};
  }
  throw std::invalid_argument("unknown preset: " + name +
                              " (rational-bump | tanh-front)");
}

SolverConfig load_config(const std::string& config_path) {
  SolverConfig config;
  if (!config_path.empty()) apply_config_file(read_file(config_path), config);
  return config;
}

std::string quality_text(const QualityReport& rep) {
  std::ostringstream os;
  rep.write_keyvalue(os);
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Low-rank quasi-conformal domain parameterization"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic boundary file");
  DomainSpec spec;
  int gm = 24, gn = 24, gdeg = 3;
  std::string gen_out = "domain.json";
  gen->add_option("--kind", spec.kind,
                  "square | quarter_annulus | star | blob")
      ->required();
  gen->add_option("--lobes", spec.lobes, "star lobes");
  gen->add_option("--amplitude", spec.amplitude, "star amplitude");
  gen->add_option("--seed", spec.seed, "blob seed");
  gen->add_option("--m", gm, "control points per u-curve minus one");
  gen->add_option("--n", gn, "control points per v-curve minus one");
  gen->add_option("--degree", gdeg, "spline degree");
  gen->add_option("--out", gen_out, "output path");

  // coons
  auto* co = app.add_subcommand("coons", "Coons map from a boundary file");
  std::string co_domain, co_out = "map.json";
  co->add_option("--domain", co_domain)->required();
  co->add_option("--out", co_out);

  // fit
  auto* fit = app.add_subcommand("fit", "full low-rank parameterization");
  std::string fit_domain, fit_out = "map.json", fit_report, fit_log,
              fit_config;
  double fit_w2 = -1.0;
  fit->add_option("--domain", fit_domain)->required();
  fit->add_option("--out", fit_out, "fitted map path");
  fit->add_option("--report", fit_report, "quality key=value path");
  fit->add_option("--log", fit_log, "convergence CSV path");
  fit->add_option("--config", fit_config, "key=value config file");
  fit->add_option("--omega2", fit_w2, "override the trace-norm weight");

  // quality
  auto* qu = app.add_subcommand("quality", "distortion report of a map");
  std::string qu_map, qu_out, qu_cells_out;
  int qu_grid = 200, qu_cells = 10;
  qu->add_option("--map", qu_map)->required();
  qu->add_option("--grid", qu_grid, "sample grid size");
  qu->add_option("--cells", qu_cells, "cell grid size");
  qu->add_option("--out", qu_out, "report path (stdout if empty)");
  qu->add_option("--cells-out", qu_cells_out, "cell CSV path");

  // solve-pde
  auto* pde = app.add_subcommand("solve-pde",
                                 "Galerkin solve with a manufactured preset");
  std::string pde_map, pde_preset = "rational-bump", pde_out;
  int pde_basis = 0, pde_grid = 64;
  pde->add_option("--map", pde_map)->required();
  pde->add_option("--preset", pde_preset, "rational-bump | tanh-front");
  pde->add_option("--num-basis", pde_basis,
                  "basis count per direction (0 = map basis)");
  pde->add_option("--out", pde_out, "solution grid CSV path");
  pde->add_option("--grid", pde_grid, "export grid size");

  // sweep-w2
  auto* sw = app.add_subcommand("sweep-w2", "rank versus trace-norm weight");
  std::string sw_domain, sw_out = "sweep.csv", sw_values = "1.5,5.5,7.5,10",
              sw_config;
  sw->add_option("--domain", sw_domain)->required();
  sw->add_option("--values", sw_values, "comma-separated omega2 values");
  sw->add_option("--out", sw_out);
  sw->add_option("--config", sw_config);

  // export
  auto* ex = app.add_subcommand("export", "SVG / CSV views of a map");
  std::string ex_map, ex_svg, ex_csv;
  int ex_cells = 10, ex_grid = 200;
  ex->add_option("--map", ex_map)->required();
  ex->add_option("--svg", ex_svg, "SVG path");
  ex->add_option("--csv", ex_csv, "cell distortion CSV path");
  ex->add_option("--cells", ex_cells);
  ex->add_option("--grid", ex_grid);

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    const BoundaryCurves b = generate_domain(spec, gm, gn, gdeg);
    write_file_atomic(gen_out, emit_domain(b));
    std::cout << "wrote " << gen_out << "\n";
    return 0;
  }
  if (*co) {
    const BoundaryCurves b = parse_domain(read_file(co_domain));
    write_file_atomic(co_out, emit_map(coons(b)));
    std::cout << "wrote " << co_out << "\n";
    return 0;
  }
  if (*fit) {
    SolverConfig config = load_config(fit_config);
    if (fit_w2 >= 0.0) config.omega2 = fit_w2;
    const BoundaryCurves b = parse_domain(read_file(fit_domain));
    const ParamResult res = parameterize(b, config);
    write_file_atomic(fit_out, emit_map(res.map));
    const QualityReport rep =
        make_report(res.map, config.quality_grid, 10, 10, config.rank_tol);
    if (!fit_report.empty()) write_file_atomic(fit_report, quality_text(rep));
    if (!fit_log.empty()) {
      std::ostringstream os;
      res.log.write_csv(os);
      write_file_atomic(fit_log, os.str());
    }
    std::cout << quality_text(rep);
    if (!res.converged) {
      std::cerr << "warning: outer loop hit the iteration cap; "
                   "best iterate written\n";
      return 2;
    }
    return 0;
  }
  if (*qu) {
    const TensorMap map = parse_map(read_file(qu_map));
    const QualityReport rep = make_report(map, qu_grid, qu_cells, qu_cells,
                                          SolverConfig{}.rank_tol);
    if (qu_out.empty()) std::cout << quality_text(rep);
    else write_file_atomic(qu_out, quality_text(rep));
    if (!qu_cells_out.empty()) {
      std::ostringstream os;
      rep.write_cell_csv(os);
      write_file_atomic(qu_cells_out, os.str());
    }
    return 0;
  }
  if (*pde) {
    const TensorMap map = parse_map(read_file(pde_map));
    const PdePreset preset = make_preset(pde_preset);
    GalerkinSystem sys;
    if (pde_basis > 0) {
      const SplineSpace su =
          SplineSpace::open_uniform(map.space_u().degree(), pde_basis);
      const SplineSpace sv =
          SplineSpace::open_uniform(map.space_v().degree(), pde_basis);
      sys = assemble(map, su, sv, preset.source, preset.exact);
    } else {
      sys = assemble(map, preset.source, preset.exact);
    }
    const ScalarField u = solve(sys);
    const double err = l2_error(u, map, preset.exact);
    std::cout << "dof=" << sys.dof << "\n";
    std::cout << "l2_error=" << err << "\n";
    std::cout << "condition=" << condition_estimate(sys.A) << "\n";
    if (!pde_out.empty()) {
      Eigen::MatrixXd grid(pde_grid, pde_grid);
      for (int i = 0; i < pde_grid; ++i)
        for (int j = 0; j < pde_grid; ++j)
          grid(i, j) = u.eval(static_cast<double>(i) / (pde_grid - 1),
                              static_cast<double>(j) / (pde_grid - 1));
      write_file_atomic(pde_out, grid_csv(grid, "u_h"));
    }
    return 0;
  }
  if (*sw) {
    SolverConfig config = load_config(sw_config);
    const BoundaryCurves b = parse_domain(read_file(sw_domain));
    std::vector<double> values;
    std::stringstream ss(sw_values);
    std::string tok;
    while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
    if (values.empty())
      throw std::invalid_argument("sweep-w2: no omega2 values");
    std::ostringstream os;
    os << "omega2,rank,sup_mu,converged\n";
    bool all_converged = true;
    for (double w2 : values) {
      SolverConfig c = config;
      c.omega2 = w2;
      const ParamResult res = parameterize(b, c);
      all_converged = all_converged && res.converged;
      char line[128];
      std::snprintf(line, sizeof(line), "%.10g,%d,%.10g,%d\n", w2,
                    numerical_rank(res.map.coeffs(), c.rank_tol),
                    sample_sup_mu(res.map, 100), res.converged ? 1 : 0);
      os << line;
    }
    write_file_atomic(sw_out, os.str());
    std::cout << os.str();
    return all_converged ? 0 : 2;
  }
  if (*ex) {
    const TensorMap map = parse_map(read_file(ex_map));
    const QualityReport rep = make_report(map, ex_grid, ex_cells, ex_cells,
                                          SolverConfig{}.rank_tol);
    if (!ex_svg.empty())
      write_file_atomic(ex_svg, export_svg(map, &rep));
    if (!ex_csv.empty()) {
      std::ostringstream os;
      rep.write_cell_csv(os);
      write_file_atomic(ex_csv, os.str());
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
