#include "popup/pipeline.hpp"

#include <iostream>
#include <sstream>

#include "popup/csv_io.hpp"
#include "popup/deployment.hpp"
#include "popup/errors.hpp"
#include "popup/io.hpp"
#include "popup/stl.hpp"

namespace popup {

namespace {

void log(const std::string& msg) { std::cerr << "popup: " << msg << '\n'; }

SliceSpec slice_spec(const PipelineConfig& c) {
  SliceSpec spec = c.slices.widths.empty() ? SliceSpec::uniform(c.slices.n, c.slices.count, c.slices.width)
                                           : SliceSpec{c.slices.n, c.slices.widths, 1.0};
  spec.validate();
  return spec;
}

// Chain length in sheet units when the target leaves it open: N times the
// first slice width.
double default_length(const SliceSpec& spec) {
  return spec.n * spec.widths.front();
}

TargetSurface make_surface(const PipelineConfig& c, const SliceSpec& spec) {
  const auto& t = c.target;
  const double span = spec.total_width();
  auto spread = [&](TargetSurface s) {
    s.set_position_map(s.domain_min(), (s.domain_max() - s.domain_min()) / span);
    return s;
  };
  if (t.kind == "plane") return TargetSurface::plane(t.length > 0 ? t.length : default_length(spec));
  if (t.kind == "cylinder") return TargetSurface::cylinder(t.radius > 0 ? t.radius : default_length(spec));
  if (t.kind == "sphere") return spread(TargetSurface::spherical_cap(t.radius, t.center, t.margin));
  if (t.kind == "saddle") return spread(TargetSurface::saddle(t.waist, t.slope, t.center, t.half_extent));
  if (t.kind == "sampled") {
    return TargetSurface::sampled(read_sampled_grid(t.grid_path), t.length > 0 ? t.length : default_length(spec));
  }
  throw Error(ErrorKind::InvalidConfig, "target.kind: no single surface for '" + t.kind + "'");
}

std::string pattern_summary(const DesignOutput& d) {
  std::ostringstream os;
  os.precision(12);
  os << "slices " << d.network.num_slices() << '\n';
  os << "segments " << d.network.segments.size() << '\n';
  os << "cuts " << d.pattern.count(LineKind::Cut) << '\n';
  os << "folds " << d.pattern.count(LineKind::Fold) << '\n';
  os << "pattern_area " << d.pattern.area() << '\n';
  os << "panel_area " << panel_area(d.network) << '\n';
  return os.str();
}

PatternOptions pattern_options(const PipelineConfig& c) {
  PatternOptions o;
  o.scale_cm = c.output.scale_cm;
  o.microcuts = c.output.microcuts;
  return o;
}

}  // namespace

std::vector<std::vector<SliceDesign>> design_patches(const PipelineConfig& config) {
  config.validate();
  std::vector<std::vector<SliceDesign>> out;
  if (config.target.kind == "composite") {
    const auto& r = config.target.composite_radii;
    const double L = config.target.composite_length;
    const int n = config.slices.n;
    std::array<double, 3> widths{};
    if (config.slices.region_widths) {
      widths = *config.slices.region_widths;
    } else {
      const auto w = region_widths(composite_profile(r[0], r[1], r[2], L), n, L);
      std::copy(w.begin(), w.end(), widths.begin());
    }
    for (const auto& patch : composite_patches(r[0], r[1], r[2], L, n, config.slices.region_counts, widths)) {
      log("region " + std::to_string(patch.region + 1) + ": " + std::to_string(patch.spec.num_slices()) + " slices");
      const auto curves = slice(patch.surface, patch.spec);
      out.push_back(optimize_slices(curves, n, config.solver));
    }
    return out;
  }
  const SliceSpec spec = slice_spec(config);
  const TargetSurface surface = make_surface(config, spec);
  log("slicing " + config.target.kind + " into " + std::to_string(spec.num_slices()) + " slices of N = " +
      std::to_string(spec.n));
  const auto curves = slice(surface, spec);
  out.push_back(optimize_slices(curves, spec.n, config.solver));
  return out;
}

DesignOutput run_design(const PipelineConfig& config) {
  const auto patches = design_patches(config);
  DesignOutput d;
  NetworkOptions no;
  no.support_factor = config.output.support_factor;
  std::vector<BranchNetwork> nets;
  int offset = 0;
  for (const auto& p : patches) {
    nets.push_back(build_network(p, no));
    for (SliceDesign s : p) {
      s.slice += offset;
      d.designs.push_back(std::move(s));
    }
    offset += static_cast<int>(p.size());
  }
  d.network = nets.size() == 1 ? nets.front() : stitch_networks(nets, no);
  const double psi_check[] = {0.0, kPi / 4, kPi / 2};
  validate_topology(d.network, psi_check);
  const PatternOptions po = pattern_options(config);
  d.pattern = build_pattern(d.network, po);
  d.svg = emit_svg(d.pattern, po);
  d.csv = network_csv(d.network);
  std::ostringstream rep;
  rep.precision(12);
  rep << pattern_summary(d);
  write_report(rep, d.designs);
  d.report = rep.str();
  return d;
}

CommandResult cmd_curvature_map(const PipelineConfig& config) {
  config.validate();
  const auto& cv = config.curvature;
  log("curvature map " + std::to_string(cv.r.n) + " x " + std::to_string(cv.lambda.n) + " x " +
      std::to_string(cv.phi.n));
  const CurvatureMap map = curvature_map(cv.r, cv.lambda, cv.phi, cv.psi);
  const std::string grid = curvature_grid_csv(map);
  const std::string contours = contour_csv(map);
  std::string design;
  std::ostringstream summary;
  summary.precision(12);
  summary << "samples " << map.samples.size() << "\ncontour_segments " << map.contours.size() << '\n';
  if (const auto target = config.curvature_target()) {
    const CurvatureDesign cd = optimize_assembly_curvature(*target);
    std::ostringstream os;
    os.precision(12);
    os << "r,lambda,phi,K,H,loss\n"
       << cd.r << ',' << cd.lambda << ',' << target->phi << ',' << cd.K << ',' << cd.H << ',' << cd.loss << '\n';
    design = os.str();
    summary << "design r " << cd.r << " lambda " << cd.lambda << " K " << cd.K << " H " << cd.H << '\n';
  }
  CommandResult res;
  ensure_directory(config.output.dir);
  const auto dir = config.output.dir;
  write_file_atomic(dir / "curvature_grid.csv", grid);
  res.files.push_back(dir / "curvature_grid.csv");
  write_file_atomic(dir / "curvature_contours.csv", contours);
  res.files.push_back(dir / "curvature_contours.csv");
  if (!design.empty()) {
    write_file_atomic(dir / "curvature_design.csv", design);
    res.files.push_back(dir / "curvature_design.csv");
  }
  res.summary = summary.str();
  return res;
}

CommandResult cmd_design(const PipelineConfig& config) {
  config.validate();
  const std::string& fmt = config.output.format;
  if (fmt == "stl-bin" || fmt == "stl-txt") {
    throw Error(ErrorKind::InvalidConfig, "design writes svg or csv; use deploy for " + fmt);
  }
  const DesignOutput d = run_design(config);
  CommandResult res;
  const auto dir = config.output.dir;
  ensure_directory(dir);
  if (fmt.empty() || fmt == "svg") {
    write_file_atomic(dir / "pattern.svg", d.svg);
    res.files.push_back(dir / "pattern.svg");
  }
  if (fmt.empty() || fmt == "csv") {
    write_file_atomic(dir / "network.csv", d.csv);
    res.files.push_back(dir / "network.csv");
  }
  write_file_atomic(dir / "report.txt", d.report);
  res.files.push_back(dir / "report.txt");
  res.summary = pattern_summary(d);
  return res;
}

CommandResult cmd_deploy(const PipelineConfig& config, const std::optional<std::filesystem::path>& network_csv) {
  config.validate();
  const std::string& fmt = config.output.format;
  if (!(fmt.empty() || fmt == "stl-bin" || fmt == "stl-txt")) {
    throw Error(ErrorKind::InvalidConfig, "deploy writes stl-bin or stl-txt, not " + fmt);
  }
  BranchNetwork net;
  if (network_csv) {
    if (!std::filesystem::exists(*network_csv)) {
      throw Error(ErrorKind::Io, "input not found: " + network_csv->string());
    }
    net = parse_network_csv(read_file(*network_csv), config.output.support_factor);
  } else {
    net = run_design(config).network;
  }
  const auto psi = config.deployment.angles();
  const TopologyReport report = validate_topology(net, psi);
  const auto frames = deployment_frames(net, config.deployment);
  const FrameExport fx = write_frames(config.output.dir, frames, psi, fmt == "stl-txt", config.output.scale_cm);
  CommandResult res;
  res.files = fx.files;
  res.files.push_back(fx.metadata);
  std::ostringstream os;
  os.precision(12);
  os << "frames " << frames.size() << "\nsegments " << report.segments << "\nnodes " << report.nodes
     << "\nconnected " << (report.connected ? "yes" : "no") << "\nmax_length_error " << report.max_length_error
     << "\nconnectivity_hash " << frames.front().connectivity_hash() << '\n';
  res.summary = os.str();
  return res;
}

CommandResult cmd_splay_study(const PipelineConfig& config) {
  config.validate();
  const SplayStructure s = config.splay_structure();
  std::vector<double> psi;
  const int m = config.splay.samples;
  for (int k = 0; k < m; ++k) psi.push_back(k == m - 1 ? kPi / 2 : (kPi / 2) * k / (m - 1));
  const CurvatureTrace trace = curvature_trace(s, psi);
  const std::string csv = trace_csv(trace);
  CommandResult res;
  ensure_directory(config.output.dir);
  write_file_atomic(config.output.dir / "splay_trace.csv", csv);
  res.files.push_back(config.output.dir / "splay_trace.csv");
  std::ostringstream os;
  os.precision(12);
  os << "sign_changes " << trace.sign_changes.size() << '\n';
  for (double p : trace.sign_changes) os << "sign_change_psi " << p << " (" << p / kPi << " pi)\n";
  res.summary = os.str();
  return res;
}

}  // namespace popup
