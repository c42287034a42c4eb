#pragma once

#include <stdexcept>
#include <string>

#include "lrqc/map.hpp"
#include "lrqc/quality.hpp"
#include "lrqc/solver.hpp"

namespace lrqc {

enum class ParseErrorCode { kMalformed, kCornerMismatch, kDegenerateCurve };

/// Parse failure with a stable code naming the violated invariant.
struct ParseError : std::runtime_error {
  ParseErrorCode code;
  ParseError(ParseErrorCode c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

/// Self-describing JSON text with degrees, knot vectors, and the four
/// boundary control polygons as [re, im] pairs.
BoundaryCurves parse_domain(const std::string& text);
std::string emit_domain(const BoundaryCurves& boundary);

/// Fitted-map round trip in the same style as the domain format.
TensorMap parse_map(const std::string& text);
std::string emit_map(const TensorMap& map);

struct DomainSpec {
  std::string kind;  // square | quarter_annulus | star | blob
  int lobes = 5;
  double amplitude = 0.2;
  unsigned seed = 1;
};

/// Synthetic boundary generators; smooth kinds fit the closed curve by
/// Greville collocation split into four compatible arcs.
BoundaryCurves generate_domain(const DomainSpec& spec, int m, int n,
                               int degree);

/// Iso-parametric curve plot; when a report is given, per-cell quads colored
/// by area distortion on a two-color ramp are drawn underneath.
std::string export_svg(const TensorMap& map, const QualityReport* quality,
                       int iso_lines = 20, int samples_per_line = 100);

/// Row-major CSV with a one-line "rows,cols,name" header.
std::string grid_csv(const Eigen::MatrixXd& values, const std::string& name);

/// Apply `key=value` lines (comments with #) onto a SolverConfig; unknown
/// keys throw.
void apply_config_file(const std::string& text, SolverConfig& config);

/// Write-temp-then-rename so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace lrqc
