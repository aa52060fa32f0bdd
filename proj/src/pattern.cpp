#include "popup/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

std::size_t CutFoldPattern::count(LineKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(lines.begin(), lines.end(), [kind](const PatternLine& l) { return l.kind == kind; }));
}

double CutFoldPattern::area() const {
  double total = 0.0;
  for (const auto& r : regions) {
    double a = 0.0;
    const std::size_t n = r.corners.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = r.corners[i];
      const Vec2& q = r.corners[(i + 1) % n];
      a += p.x() * q.y() - q.x() * p.y();
    }
    total += 0.5 * std::abs(a);
  }
  return total;
}

namespace {

using Interval = std::pair<double, double>;

// Subtracts the gap intervals from [lo, hi].
std::vector<Interval> subtract(double lo, double hi, std::vector<Interval> gaps) {
  std::sort(gaps.begin(), gaps.end());
  std::vector<Interval> out;
  double cur = lo;
  for (const auto& [a, b] : gaps) {
    if (b <= cur || a >= hi) continue;
    if (a > cur) out.emplace_back(cur, a);
    cur = std::max(cur, b);
  }
  if (cur < hi) out.emplace_back(cur, hi);
  return out;
}

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second + 1e-12) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

}  // namespace

CutFoldPattern build_pattern(const BranchNetwork& network, const PatternOptions& options) {
  if (!(options.scale_cm > 0)) throw Error(ErrorKind::InvalidConfig, "pattern scale must be positive");
  if (network.num_slices() == 0) throw Error(ErrorKind::EmptyNetwork, "network has no slices");
  CutFoldPattern p;
  p.scale_cm = options.scale_cm;
  const double k = options.scale_cm;
  double lmax = 0.0;
  for (double L : network.slice_lengths) lmax = std::max(lmax, L);
  // Flat state: sheet coordinate along the strip is x - z (the map at psi = pi).
  auto sheet = [&](const Vec3& v) { return Vec2(v.y() * k, (v.x() - v.z() + lmax) * k); };

  // Bridge rectangles and the cut gaps they open.
  std::map<long long, std::vector<Interval>> gaps;  // keyed by quantized edge x
  auto edge_key = [](double x) { return std::llround(x * 1e9); };
  std::vector<double> edges;
  for (int j = 0; j <= network.num_slices(); ++j) {
    edges.push_back(k * (j < network.num_slices() ? network.slice_offsets[j]
                                                  : network.slice_offsets[j - 1] + network.slice_widths[j - 1]));
  }
  int bridge_index = 0;
  for (const auto& s : network.segments) {
    if (s.tag != SegmentTag::Separation && s.tag != SegmentTag::SupportStrip) continue;
    const Vec2 a = sheet(s.start);
    const Vec2 b = sheet(s.end);
    const Vec2 d = (b - a).normalized();
    const Vec2 e = Vec2(-d.y(), d.x()) * (0.5 * s.width * k);
    PatternRegion r;
    r.corners = {a - e, a + e, b + e, b - e};
    const bool support = s.tag == SegmentTag::SupportStrip;
    r.id = (support ? "support-s" : "sep-s") + std::to_string(s.slice) + "-l" + std::to_string(s.level);
    p.regions.push_back(r);
    PatternLine line;
    line.a = a;
    line.b = b;
    line.kind = LineKind::Fold;
    line.group = support ? "support-strips" : "folds";
    line.id = r.id + "-" + std::to_string(bridge_index++);
    line.slice = s.slice;
    line.unit = s.level;
    p.lines.push_back(line);
    // Gap on every strip edge the bridge crosses.
    const double xlo = std::min(a.x(), b.x());
    const double xhi = std::max(a.x(), b.x());
    for (double ex : edges) {
      if (ex <= xlo + 1e-12 || ex >= xhi - 1e-12) continue;
      double ylo = 1e300;
      double yhi = -1e300;
      for (int c = 0; c < 4; ++c) {
        const Vec2 u = r.corners[c];
        const Vec2 v = r.corners[(c + 1) % 4];
        if ((u.x() - ex) * (v.x() - ex) > 0.0 || u.x() == v.x()) continue;
        const double t = (ex - u.x()) / (v.x() - u.x());
        const double y = u.y() + t * (v.y() - u.y());
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
      if (ylo < yhi) gaps[edge_key(ex)].emplace_back(ylo, yhi);
    }
  }

  // Strips: material regions and folds.
  std::map<long long, std::vector<Interval>> edge_spans;
  std::map<long long, double> edge_x;
  for (int j = 0; j < network.num_slices(); ++j) {
    const double L = network.slice_lengths[j];
    const double x0 = edges[j];
    const double x1 = edges[j + 1];
    const double y0 = (lmax - L) * k;
    const double y1 = (lmax + L) * k;
    PatternRegion r;
    r.corners = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    r.id = "strip-s" + std::to_string(j);
    p.regions.push_back(r);
    for (double ex : {x0, x1}) {
      edge_spans[edge_key(ex)].emplace_back(y0, y1);
      edge_x[edge_key(ex)] = ex;
    }
    // Fold lines at every panel end point, top to bottom, deduplicated.
    // Split z-panels only contribute their lowest end (the fold vertex).
    std::vector<std::pair<double, std::string>> folds;
    std::map<int, Vec3> bottom;
    for (const auto& s : network.segments) {
      if (s.slice != j) continue;
      if (s.tag == SegmentTag::XPanel) {
        folds.emplace_back(sheet(s.start).y(), "u" + std::to_string(s.level - 1) + "-p");
        folds.emplace_back(sheet(s.end).y(), "u" + std::to_string(s.level) + "-c");
      } else if (s.tag == SegmentTag::ZPanel) {
        auto it = bottom.find(s.level);
        if (it == bottom.end() || s.end.z() < it->second.z()) bottom[s.level] = s.end;
      }
    }
    for (const auto& [level, v] : bottom) folds.emplace_back(sheet(v).y(), "u" + std::to_string(level) + "-p");
    std::vector<std::pair<double, std::string>> uniq;
    for (const auto& f : folds) {
      const bool seen = std::any_of(uniq.begin(), uniq.end(), [&](const auto& u) { return std::abs(u.first - f.first) <= 1e-9 * k; });
      if (!seen) uniq.push_back(f);
    }
    for (const auto& [y, tag] : uniq) {
      PatternLine line;
      line.a = {x0, y};
      line.b = {x1, y};
      line.kind = LineKind::Fold;
      line.group = "folds";
      line.id = "fold-s" + std::to_string(j) + "-" + tag;
      line.slice = j;
      line.unit = std::stoi(tag.substr(1, tag.find('-') - 1));
      p.lines.push_back(line);
    }
  }

  // Cuts along strip edges: shared edges merged, bridge gaps removed.
  int cut_index = 0;
  for (auto& [key, spans] : edge_spans) {
    const double ex = edge_x[key];
    for (const auto& [lo, hi] : merge(spans)) {
      for (const auto& [a, b] : subtract(lo, hi, gaps[key])) {
        if (b - a <= 1e-12) continue;
        PatternLine line;
        line.a = {ex, a};
        line.b = {ex, b};
        line.kind = LineKind::Cut;
        line.group = "cuts";
        line.id = "cut-" + std::to_string(cut_index++);
        p.lines.push_back(line);
      }
    }
  }

  // Bounding box over everything drawn.
  p.min = Vec2::Constant(1e300);
  p.max = Vec2::Constant(-1e300);
  auto grow = [&](const Vec2& v) {
    p.min = p.min.cwiseMin(v);
    p.max = p.max.cwiseMax(v);
  };
  for (const auto& l : p.lines) {
    grow(l.a);
    grow(l.b);
  }
  for (const auto& r : p.regions) {
    for (const auto& c : r.corners) grow(c);
  }
  std::stable_sort(p.lines.begin(), p.lines.end(), [](const PatternLine& a, const PatternLine& b) {
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return p;
}

std::string emit_svg(const CutFoldPattern& pattern, const PatternOptions& options) {
  if (options.microcuts && !(options.micro_cut > 0 && options.micro_gap >= 0)) {
    throw Error(ErrorKind::InvalidConfig, "micro-cut length must be positive and the gap non-negative");
  }
  std::ostringstream os;
  os << std::setprecision(12);
  const Vec2 size = pattern.max - pattern.min;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size.x() << "cm\" height=\"" << size.y()
     << "cm\" viewBox=\"" << pattern.min.x() << " " << pattern.min.y() << " " << size.x() << " " << size.y()
     << "\" data-units=\"cm\" data-scale=\"" << pattern.scale_cm << "\">\n";
  const double stroke = 0.02;
  auto group = [&](const std::string& name, const std::string& style) {
    os << "<g id=\"" << name << "\" fill=\"none\" stroke-width=\"" << stroke << "\" " << style << ">\n";
    for (const auto& l : pattern.lines) {
      if (l.group != name) continue;
      os << "<line id=\"" << l.id << "\" x1=\"" << l.a.x() << "\" y1=\"" << l.a.y() << "\" x2=\"" << l.b.x()
         << "\" y2=\"" << l.b.y() << "\" data-kind=\"" << (l.kind == LineKind::Cut ? "cut" : "fold")
         << "\" data-slice=\"" << l.slice << "\" data-unit=\"" << l.unit << "\"/>\n";
    }
    os << "</g>\n";
  };
  std::ostringstream dash;
  dash << "stroke=\"blue\" stroke-dasharray=\"" << options.micro_cut << " " << options.micro_gap << "\"";
  group("cuts", "stroke=\"black\"");
  group("folds", dash.str());
  std::ostringstream sdash;
  sdash << "stroke=\"green\" stroke-dasharray=\"" << options.micro_cut << " " << options.micro_gap << "\"";
  group("support-strips", sdash.str());
  if (options.microcuts) {
    os << "<g id=\"microcuts\" fill=\"none\" stroke=\"red\" stroke-width=\"" << stroke << "\">\n";
    for (const auto& l : pattern.lines) {
      if (l.kind != LineKind::Fold) continue;
      const double len = (l.b - l.a).norm();
      if (len <= 0.0) continue;
      const Vec2 d = (l.b - l.a) / len;
      int m = 0;
      for (double t = 0.0; t < len; t += options.micro_cut + options.micro_gap, ++m) {
        const Vec2 a = l.a + t * d;
        const Vec2 b = l.a + std::min(len, t + options.micro_cut) * d;
        os << "<path id=\"" << l.id << "-m" << m << "\" d=\"M " << a.x() << " " << a.y() << " L " << b.x() << " "
           << b.y() << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace popup
