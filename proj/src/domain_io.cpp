#include "lrqc/domain_io.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

namespace lrqc {

namespace {

using json = nlohmann::ordered_json;

json complex_list(const std::vector<Complex>& pts) {
  json out = json::array();
  for (const Complex& z : pts) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> read_complex_list(const json& arr, const char* name) {
  if (!arr.is_array())
    throw ParseError(ParseErrorCode::kMalformed,
                     std::string(name) + " is not an array");
  std::vector<Complex> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number())
      throw ParseError(ParseErrorCode::kMalformed,
                       std::string(name) + " entries must be [re, im] pairs");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

std::vector<double> read_knots(const json& arr, const char* name) {
  if (!arr.is_array())
    throw ParseError(ParseErrorCode::kMalformed,
                     std::string(name) + " is not an array");
  std::vector<double> out;
  for (const auto& e : arr) {
    if (!e.is_number())
      throw ParseError(ParseErrorCode::kMalformed,
                       std::string(name) + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

json parse_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw ParseError(ParseErrorCode::kMalformed, "not valid JSON");
  return doc;
}

SplineSpace read_space(const json& doc, const char* dkey, const char* kkey) {
  if (!doc.contains(dkey) || !doc[dkey].is_number_integer())
    throw ParseError(ParseErrorCode::kMalformed,
                     std::string(dkey) + " missing or not an integer");
  try {
    return SplineSpace(doc[dkey].get<int>(), read_knots(doc.at(kkey), kkey));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(ParseErrorCode::kMalformed, e.what());
  }
}

void require_format(const json& doc, const std::string& format) {
  if (!doc.is_object() || !doc.contains("format") ||
      doc["format"] != format || !doc.contains("version") ||
      doc["version"] != 1)
    throw ParseError(ParseErrorCode::kMalformed,
                     "missing/unrecognized format or version (expected " +
                         format + " v1)");
}

/// Greville-collocation fit of a parametric curve; reproduces the endpoints
/// and any linear curve exactly.
std::vector<Complex> fit_curve(const SplineSpace& space,
                               const std::function<Complex(double)>& curve) {
  const int n = space.num_basis(), p = space.degree();
  const std::vector<double> g = space.greville();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXcd rhs(n);
  std::vector<double> vals(p + 1);
  for (int k = 0; k < n; ++k) {
    const int span = space.eval_basis(g[k], vals.data());
    for (int i = 0; i <= p; ++i) B(k, span - p + i) = vals[i];
    rhs(k) = curve(g[k]);
  }
  const Eigen::VectorXcd c =
      Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(rhs.real()).eval() +
      Complex(0, 1) *
          Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(rhs.imag()).eval();
  return {c.data(), c.data() + n};
}

BoundaryCurves four_arc_boundary(const SplineSpace& su, const SplineSpace& sv,
                                 const std::function<Complex(double)>& gamma) {
  // gamma is a closed curve on [0,1); split at the quarter parameters with
  // the usual corner pairing (top/left traversed backwards).
  BoundaryCurves b{su, sv, {}, {}, {}, {}};
  b.bottom = fit_curve(su, [&](double t) { return gamma(0.25 * t); });
  b.right = fit_curve(sv, [&](double t) { return gamma(0.25 + 0.25 * t); });
  b.top = fit_curve(su, [&](double t) { return gamma(0.75 - 0.25 * t); });
  b.left = fit_curve(sv, [&](double t) { return gamma(1.0 - 0.25 * t); });
  b.validate();
  return b;
}

double ramp(double t) { return std::clamp(t, 0.0, 1.0); }

std::string ramp_color(double t) {
  // Linear two-color ramp blue -> red.
  const int r = static_cast<int>(std::lround(33 + ramp(t) * (178 - 33)));
  const int g = static_cast<int>(std::lround(102 + ramp(t) * (24 - 102)));
  const int b = static_cast<int>(std::lround(172 + ramp(t) * (43 - 172)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

BoundaryCurves parse_domain(const std::string& text) {
  const json doc = parse_text(text);
  require_format(doc, "lrqc-domain");
  for (const char* key : {"knots_u", "knots_v", "bottom", "top", "left",
                          "right"})
    if (!doc.contains(key))
      throw ParseError(ParseErrorCode::kMalformed,
                       std::string("missing field ") + key);
  BoundaryCurves b{read_space(doc, "degree_u", "knots_u"),
                   read_space(doc, "degree_v", "knots_v"),
                   read_complex_list(doc["bottom"], "bottom"),
                   read_complex_list(doc["top"], "top"),
                   read_complex_list(doc["left"], "left"),
                   read_complex_list(doc["right"], "right")};
  try {
    b.validate();
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const ParseErrorCode code =
        what.find("corner") != std::string::npos
            ? ParseErrorCode::kCornerMismatch
            : (what.find("degenerate") != std::string::npos
                   ? ParseErrorCode::kDegenerateCurve
                   : ParseErrorCode::kMalformed);
    throw ParseError(code, what);
  }
  return b;
}

std::string emit_domain(const BoundaryCurves& boundary) {
  boundary.validate();
  json doc;
  doc["format"] = "lrqc-domain";
  doc["version"] = 1;
  doc["degree_u"] = boundary.space_u.degree();
  doc["degree_v"] = boundary.space_v.degree();
  doc["knots_u"] = boundary.space_u.knots();
  doc["knots_v"] = boundary.space_v.knots();
  doc["bottom"] = complex_list(boundary.bottom);
  doc["top"] = complex_list(boundary.top);
  doc["left"] = complex_list(boundary.left);
  doc["right"] = complex_list(boundary.right);
  return doc.dump(2) + "\n";
}

TensorMap parse_map(const std::string& text) {
  const json doc = parse_text(text);
  require_format(doc, "lrqc-map");
  const SplineSpace su = read_space(doc, "degree_u", "knots_u");
  const SplineSpace sv = read_space(doc, "degree_v", "knots_v");
  if (!doc.contains("coeffs") || !doc["coeffs"].is_array() ||
      doc["coeffs"].size() != static_cast<size_t>(su.num_basis()))
    throw ParseError(ParseErrorCode::kMalformed,
                     "coeffs must have num_basis_u rows");
  Eigen::MatrixXcd C(su.num_basis(), sv.num_basis());
  for (int i = 0; i < su.num_basis(); ++i) {
    const std::vector<Complex> row =
        read_complex_list(doc["coeffs"][i], "coeffs row");
    if (row.size() != static_cast<size_t>(sv.num_basis()))
      throw ParseError(ParseErrorCode::kMalformed,
                       "coeffs row length must be num_basis_v");
    for (int j = 0; j < sv.num_basis(); ++j) C(i, j) = row[j];
  }
  return TensorMap(su, sv, std::move(C));
}

std::string emit_map(const TensorMap& map) {
  json doc;
  doc["format"] = "lrqc-map";
  doc["version"] = 1;
  doc["degree_u"] = map.space_u().degree();
  doc["degree_v"] = map.space_v().degree();
  doc["knots_u"] = map.space_u().knots();
  doc["knots_v"] = map.space_v().knots();
  json rows = json::array();
  for (int i = 0; i <= map.m(); ++i) {
    json row = json::array();
    for (int j = 0; j <= map.n(); ++j)
      row.push_back({map.coeffs()(i, j).real(), map.coeffs()(i, j).imag()});
    rows.push_back(std::move(row));
  }
  doc["coeffs"] = std::move(rows);
  return doc.dump(2) + "\n";
}

BoundaryCurves generate_domain(const DomainSpec& spec, int m, int n,
                               int degree) {
  const SplineSpace su = SplineSpace::open_uniform(degree, m + 1);
  const SplineSpace sv = SplineSpace::open_uniform(degree, n + 1);
  if (spec.kind == "square") {
    const std::vector<double> gu = su.greville(), gv = sv.greville();
    BoundaryCurves b{su, sv, {}, {}, {}, {}};
    for (double t : gu) {
      b.bottom.emplace_back(t, 0.0);
      b.top.emplace_back(t, 1.0);
    }
    for (double t : gv) {
      b.left.emplace_back(0.0, t);
      b.right.emplace_back(1.0, t);
    }
    b.validate();
    return b;
  }
  if (spec.kind == "quarter_annulus") {
    // Angle decreases with u so (u, v) -> (angle, radius) keeps J > 0.
    BoundaryCurves b{su, sv, {}, {}, {}, {}};
    b.bottom = fit_curve(
        su, [](double t) { return std::polar(1.0, 0.5 * M_PI * (1.0 - t)); });
    b.top = fit_curve(
        su, [](double t) { return std::polar(2.0, 0.5 * M_PI * (1.0 - t)); });
    b.left = fit_curve(sv, [](double t) { return Complex(0.0, 1.0 + t); });
    b.right = fit_curve(sv, [](double t) { return Complex(1.0 + t, 0.0); });
    b.validate();
    return b;
  }
  if (spec.kind == "star") {
    if (spec.lobes < 2 || spec.amplitude <= 0.0 || spec.amplitude >= 1.0)
      throw std::invalid_argument("star: need lobes >= 2, amplitude in (0,1)");
    const int lobes = spec.lobes;
    const double A = spec.amplitude;
    const double theta0 = 1.25 * M_PI;
    return four_arc_boundary(su, sv, [=](double s) {
      const double th = theta0 + 2.0 * M_PI * s;
      return std::polar(1.0 + A * std::cos(lobes * th), th);
    });
  }
  if (spec.kind == "blob") {
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> amp(0.03, 0.09);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::vector<double> a, ph;
    for (int k = 2; k <= 5; ++k) {
      a.push_back(amp(rng));
      ph.push_back(phase(rng));
    }
    const double theta0 = 1.25 * M_PI;
    return four_arc_boundary(su, sv, [=](double s) {
      const double th = theta0 + 2.0 * M_PI * s;
      double r = 1.0;
      for (int k = 2; k <= 5; ++k)
        r += a[k - 2] * std::cos(k * th + ph[k - 2]);
      return std::polar(r, th);
    });
  }
  throw std::invalid_argument("unknown domain kind: " + spec.kind);
}

std::string export_svg(const TensorMap& map, const QualityReport* quality,
                       int iso_lines, int samples_per_line) {
  if (iso_lines < 2 || samples_per_line < 2)
    throw std::invalid_argument("export_svg: need >= 2 lines and samples");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int j = 0; j <= map.n(); ++j)
    for (int i = 0; i <= map.m(); ++i) {
      xmin = std::min(xmin, map.coeffs()(i, j).real());
      xmax = std::max(xmax, map.coeffs()(i, j).real());
      ymin = std::min(ymin, map.coeffs()(i, j).imag());
      ymax = std::max(ymax, map.coeffs()(i, j).imag());
    }
  const double margin = 0.05 * std::hypot(xmax - xmin, ymax - ymin);
  const double stroke = 0.004 * std::hypot(xmax - xmin, ymax - ymin);
  std::ostringstream os;
  char buf[256];
  const auto px = [&](Complex z) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g", z.real(), ymax - z.imag());
    return std::string(buf);
  };
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6g "
                "%.6g %.6g %.6g\">\n",
                xmin - margin, -margin, (xmax - xmin) + 2 * margin,
                (ymax - ymin) + 2 * margin);
  os << buf;
  if (quality && quality->cell_area_distortion.size() > 0) {
    const Eigen::MatrixXd& cells = quality->cell_area_distortion;
    const double lo = cells.minCoeff(), hi = cells.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    const int M = static_cast<int>(cells.rows());
    const int N = static_cast<int>(cells.cols());
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j) {
        const double u0 = static_cast<double>(i) / M, u1 = (i + 1.0) / M;
        const double v0 = static_cast<double>(j) / N, v1 = (j + 1.0) / N;
        os << "<polygon points=\"" << px(map.eval(u0, v0)) << " "
           << px(map.eval(u1, v0)) << " " << px(map.eval(u1, v1)) << " "
           << px(map.eval(u0, v1)) << "\" fill=\""
           << ramp_color((cells(i, j) - lo) / span) << "\"/>\n";
      }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.6g\" y=\"%.6g\" font-size=\"%.6g\">cell J_s "
                  "min %.6g max %.6g</text>\n",
                  xmin, -0.3 * margin, 8.0 * stroke, lo, hi);
    os << buf;
  }
  const auto polyline = [&](bool u_const, double fixed) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"";
    std::snprintf(buf, sizeof(buf), "%.6g", stroke);
    os << buf << "\" points=\"";
    for (int s = 0; s < samples_per_line; ++s) {
      const double t = static_cast<double>(s) / (samples_per_line - 1);
      os << px(u_const ? map.eval(fixed, t) : map.eval(t, fixed));
      if (s + 1 < samples_per_line) os << " ";
    }
    os << "\"/>\n";
  };
  for (int k = 0; k < iso_lines; ++k) {
    const double t = static_cast<double>(k) / (iso_lines - 1);
    polyline(true, t);
    polyline(false, t);
  }
  os << "</svg>\n";
  return os.str();
}

std::string grid_csv(const Eigen::MatrixXd& values, const std::string& name) {
  std::ostringstream os;
  os << values.rows() << "," << values.cols() << "," << name << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", values(i, j));
      os << buf << (j + 1 < values.cols() ? ',' : '\n');
    }
  return os.str();
}

void apply_config_file(const std::string& text, SolverConfig& config) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Trim.
    const size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const auto trim = [](std::string s) {
      const size_t lo = s.find_first_not_of(" \t");
      if (lo == std::string::npos) return std::string();
      return s.substr(lo, s.find_last_not_of(" \t") - lo + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const auto as_double = [&] { return std::stod(val); };
    const auto as_int = [&] { return std::stoi(val); };
    if (key == "omega1") config.omega1 = as_double();
    else if (key == "omega2") config.omega2 = as_double();
    else if (key == "omega3") config.omega3 = as_double();
    else if (key == "lambda") config.lambda = as_double();
    else if (key == "rho") config.rho = as_double();
    else if (key == "eps") config.eps = as_double();
    else if (key == "eps0") config.eps0 = as_double();
    else if (key == "delta") config.delta = as_double();
    else if (key == "m") config.m = as_int();
    else if (key == "n") config.n = as_int();
    else if (key == "m_tilde") config.m_tilde = as_int();
    else if (key == "n_tilde") config.n_tilde = as_int();
    else if (key == "degree") config.degree = as_int();
    else if (key == "admm_max_iters") config.admm_max_iters = as_int();
    else if (key == "outer_max_iters") config.outer_max_iters = as_int();
    else if (key == "admm_c_tol") config.admm_c_tol = as_double();
    else if (key == "pcg_tol") config.pcg_tol = as_double();
    else if (key == "pcg_max_iters") config.pcg_max_iters = as_int();
    else if (key == "quad_points") config.quad_points = as_int();
    else if (key == "quality_grid") config.quality_grid = as_int();
    else if (key == "rank_tol") config.rank_tol = as_double();
    else if (key == "precond") {
      if (val == "jacobi") config.precond = PrecondKind::kJacobi;
      else if (val == "ichol") config.precond = PrecondKind::kIncompleteCholesky;
      else throw std::invalid_argument("config: precond must be jacobi|ichol");
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace lrqc
