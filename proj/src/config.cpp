#include "popup/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "popup/errors.hpp"
#include "popup/io.hpp"

namespace popup {

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, key + ": " + why);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) bad(key, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  int out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  bad(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) bad(key, "expected a comma-separated list");
  return out;
}

template <std::size_t K>
std::array<double, K> to_array(const std::string& key, const std::string& v) {
  const auto list = to_list(key, v);
  if (list.size() != K) bad(key, "expected " + std::to_string(K) + " values, got " + std::to_string(list.size()));
  std::array<double, K> out{};
  std::copy(list.begin(), list.end(), out.begin());
  return out;
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad("line " + std::to_string(lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(lineno), "expected key = value");
    if (section.empty()) bad("line " + std::to_string(lineno), "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    if (doc[section].count(key)) bad(section + "." + key, "duplicate key");
    doc[section][key] = trim(line.substr(eq + 1));
  }
  return doc;
}

GridAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) bad("grid axis '" + text + "'", "expected min:max:n");
  GridAxis a;
  a.min = to_double("grid min", parts[0]);
  a.max = to_double("grid max", parts[1]);
  a.n = to_int("grid n", parts[2]);
  if (a.n < 1) bad("grid axis '" + text + "'", "needs at least one sample");
  if (!(a.max > a.min) && !(a.n == 1 && a.max == a.min)) bad("grid axis '" + text + "'", "empty range");
  return a;
}

std::pair<GridAxis, GridAxis> parse_grid(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) bad("grid '" + text + "'", "expected r_min:r_max:n,lambda_min:lambda_max:n");
  return {parse_axis(text.substr(0, comma)), parse_axis(text.substr(comma + 1))};
}

PipelineConfig parse_config(const std::string& text) {
  const IniDocument doc = parse_ini(text);
  PipelineConfig c;
  const std::map<std::string, std::set<std::string>> known{
      {"target", {"kind", "radius", "length", "center", "margin", "waist", "slope", "half_extent", "radii",
                  "composite_length", "grid"}},
      {"slices", {"n", "count", "width", "widths", "region_counts", "region_widths"}},
      {"solver", {"tol_eq", "tol_kkt", "max_outer", "max_inner", "penalty", "penalty_growth", "min_length"}},
      {"deployment", {"frames"}},
      {"output", {"dir", "format", "scale_cm", "microcuts", "support_factor"}},
      {"curvature", {"r", "lambda", "phi", "psi", "target_K", "target_H"}},
      {"splay", {"alpha", "spacing", "width", "samples"}},
  };
  for (const auto& [section, entries] : doc) {
    const auto it = known.find(section);
    if (it == known.end()) bad("[" + section + "]", "unknown section");
    for (const auto& [key, value] : entries) {
      if (!it->second.count(key)) bad(section + "." + key, "unknown key");
      const std::string k = section + "." + key;
      if (section == "target") {
        auto& t = c.target;
        if (key == "kind") t.kind = value;
        else if (key == "radius") t.radius = to_double(k, value);
        else if (key == "length") t.length = to_double(k, value);
        else if (key == "center") t.center = to_double(k, value);
        else if (key == "margin") t.margin = to_double(k, value);
        else if (key == "waist") t.waist = to_double(k, value);
        else if (key == "slope") t.slope = to_double(k, value);
        else if (key == "half_extent") t.half_extent = to_double(k, value);
        else if (key == "radii") t.composite_radii = to_array<3>(k, value);
        else if (key == "composite_length") t.composite_length = to_double(k, value);
        else if (key == "grid") t.grid_path = value;
      } else if (section == "slices") {
        auto& s = c.slices;
        if (key == "n") s.n = to_int(k, value);
        else if (key == "count") s.count = to_int(k, value);
        else if (key == "width") s.width = to_double(k, value);
        else if (key == "widths") s.widths = to_list(k, value);
        else if (key == "region_widths") s.region_widths = to_array<3>(k, value);
        else if (key == "region_counts") {
          const auto v = to_array<3>(k, value);
          for (int i = 0; i < 3; ++i) {
            if (v[i] != std::floor(v[i])) bad(k, "counts must be integers");
            s.region_counts[i] = static_cast<int>(v[i]);
          }
        }
      } else if (section == "solver") {
        auto& s = c.solver;
        if (key == "tol_eq") s.tol_eq = to_double(k, value);
        else if (key == "tol_kkt") s.tol_kkt = to_double(k, value);
        else if (key == "max_outer") s.max_outer = to_int(k, value);
        else if (key == "max_inner") s.max_inner = to_int(k, value);
        else if (key == "penalty") s.penalty = to_double(k, value);
        else if (key == "penalty_growth") s.penalty_growth = to_double(k, value);
        else if (key == "min_length") s.min_length = to_double(k, value);
      } else if (section == "deployment") {
        c.deployment.frames = to_int(k, value);
      } else if (section == "output") {
        auto& o = c.output;
        if (key == "dir") o.dir = value;
        else if (key == "format") o.format = value;
        else if (key == "scale_cm") o.scale_cm = to_double(k, value);
        else if (key == "microcuts") o.microcuts = to_bool(k, value);
        else if (key == "support_factor") o.support_factor = to_double(k, value);
      } else if (section == "curvature") {
        auto& cv = c.curvature;
        if (key == "r") cv.r = parse_axis(value);
        else if (key == "lambda") cv.lambda = parse_axis(value);
        else if (key == "phi") {
          if (value.find(':') != std::string::npos) {
            cv.phi = parse_axis(value);
          } else {
            const double p = to_double(k, value);
            cv.phi = {p, p, 1};
          }
        } else if (key == "psi") cv.psi = to_double(k, value);
        else if (key == "target_K") cv.target_K = to_double(k, value);
        else if (key == "target_H") cv.target_H = to_double(k, value);
      } else if (section == "splay") {
        auto& sp = c.splay;
        if (key == "alpha") sp.alpha = to_array<5>(k, value);
        else if (key == "spacing") sp.spacing = to_double(k, value);
        else if (key == "width") sp.width = to_double(k, value);
        else if (key == "samples") sp.samples = to_int(k, value);
      }
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "config file not found: " + path.string());
  return parse_config(read_file(path));
}

void PipelineConfig::validate() const {
  static const std::set<std::string> kinds{"plane", "cylinder", "sphere", "saddle", "composite", "sampled"};
  if (!kinds.count(target.kind)) bad("target.kind", "unknown surface '" + target.kind + "'");
  if (slices.n < 1) bad("slices.n", "units per slice must be >= 1");
  if (slices.widths.empty()) {
    if (slices.count < 1) bad("slices.count", "need at least one slice");
    if (!(slices.width > 0)) bad("slices.width", "must be positive");
  }
  for (double w : slices.widths) {
    if (!(w > 0)) bad("slices.widths", "all widths must be positive");
  }
  if (target.kind == "composite") {
    for (int k : slices.region_counts) {
      if (k < 1) bad("slices.region_counts", "each region needs at least one slice");
    }
    if (slices.region_widths) {
      for (double w : *slices.region_widths) {
        if (!(w > 0)) bad("slices.region_widths", "must be positive");
      }
    }
    const auto& r = target.composite_radii;
    if (!(r[0] > r[2] && r[2] > r[1] && r[1] > 0)) bad("target.radii", "need R1 > R3 > R2 > 0");
    if (!(target.composite_length > 0)) bad("target.composite_length", "must be positive");
  }
  if (target.radius < 0) bad("target.radius", "must be non-negative");
  if (target.length < 0) bad("target.length", "must be non-negative");
  if (target.kind == "sphere" && !(target.radius > 0 && target.margin > 0 && target.margin < target.radius)) {
    bad("target", "sphere needs radius > margin > 0");
  }
  if (target.kind == "saddle" && !(target.waist > 0 && target.slope >= 0 && target.half_extent > 0)) {
    bad("target", "saddle needs waist > 0, slope >= 0, half_extent > 0");
  }
  if (target.kind == "sampled" && target.grid_path.empty()) bad("target.grid", "sampled surface needs a grid CSV");
  try {
    solver.validate();
    deployment.validate();
  } catch (const Error& e) {
    bad("solver/deployment", e.what());
  }
  if (output.dir.empty()) bad("output.dir", "must not be empty");
  static const std::set<std::string> formats{"", "svg", "csv", "stl-bin", "stl-txt"};
  if (!formats.count(output.format)) bad("output.format", "expected svg, csv, stl-bin or stl-txt");
  if (!(output.scale_cm > 0)) bad("output.scale_cm", "must be positive");
  if (!(output.support_factor > 0 && output.support_factor <= 1)) bad("output.support_factor", "must be in (0, 1]");
  if (!(curvature.psi >= 0 && curvature.psi <= kPi)) bad("curvature.psi", "must be in [0, pi]");
  if (splay.samples < 2) bad("splay.samples", "need at least 2 samples");
  if (!(splay.spacing > 0) || !(splay.width > 0)) bad("splay", "spacing and width must be positive");
}

SplayStructure PipelineConfig::splay_structure() const {
  SplayStructure s = splay.alpha ? SplayStructure::uniform(0.0) : SplayStructure::designed();
  if (splay.alpha) s.alpha = *splay.alpha;
  s.spacing = splay.spacing;
  s.width = splay.width;
  return s;
}

std::optional<CurvatureTarget> PipelineConfig::curvature_target() const {
  if (!curvature.target_K && !curvature.target_H) return std::nullopt;
  CurvatureTarget t;
  t.K = curvature.target_K;
  t.H = curvature.target_H;
  t.phi = curvature.phi.min;
  t.psi = curvature.psi;
  return t;
}

}  // namespace popup
