#include "popup/branching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

std::string to_string(SegmentTag tag) {
  switch (tag) {
    case SegmentTag::XPanel: return "x-panel";
    case SegmentTag::ZPanel: return "z-panel";
    case SegmentTag::Separation: return "separation";
    case SegmentTag::SupportStrip: return "support-strip";
  }
  return "unknown";
}

SegmentTag parse_tag(const std::string& s) {
  if (s == "x-panel") return SegmentTag::XPanel;
  if (s == "z-panel") return SegmentTag::ZPanel;
  if (s == "separation") return SegmentTag::Separation;
  if (s == "support-strip") return SegmentTag::SupportStrip;
  throw Error(ErrorKind::InvalidConfig, "unknown segment tag '" + s + "'");
}

SegmentRecord SegmentRecord::make(const Vec3& a, const Vec3& b, SegmentTag tag, int slice, int level, double width) {
  return {a, b, (b - a).norm(), tag, slice, level, width};
}

SegmentRecord deploy_segment(const SegmentRecord& s, double psi) {
  const DeploymentAngle a(psi);
  SegmentRecord out = s;
  out.start = deploy_point(s.start, a);
  out.end = deploy_point(s.end, a);
  out.length = (out.end - out.start).norm();
  return out;
}

BranchNetwork::Graph BranchNetwork::graph(double tol) const {
  Graph g;
  auto node = [&](const Vec3& p) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if ((g.nodes[i] - p).norm() <= tol) return static_cast<int>(i);
    }
    g.nodes.push_back(p);
    return static_cast<int>(g.nodes.size()) - 1;
  };
  for (const auto& s : segments) g.edges.emplace_back(node(s.start), node(s.end));
  return g;
}

bool BranchNetwork::connected(double tol) const {
  const Graph g = graph(tol);
  if (g.nodes.empty()) return false;
  std::vector<int> parent(g.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : g.edges) parent[find(a)] = find(b);
  const int root = find(0);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (find(static_cast<int>(i)) != root) return false;
  }
  return true;
}

namespace {

// Staircase of one slice in its (x, z) plane.
struct Staircase {
  std::vector<double> X;  // X[0] = 0 .. X[N] = L
  std::vector<double> Z;  // cumulative lz
  double L = 0.0;
  double y = 0.0;
  double width = 0.0;

  int n() const { return static_cast<int>(X.size()) - 1; }
  Vec3 P(int i) const { return {X[i], y, L - Z[i]}; }
  Vec3 C(int i) const { return {X[i], y, L - Z[i - 1]}; }
};

struct Landing {
  Vec3 point;
  int unit = 0;       // z-panel that holds the point
  bool interior = false;
};

std::optional<Landing> land(const Staircase& s, double h, double tol) {
  for (int k = 1; k <= s.n(); ++k) {
    const double top = s.L - s.Z[k - 1];
    const double bot = s.L - s.Z[k];
    if (std::abs(h - top) <= tol) return Landing{s.P(k - 1), k - 1, false};
    if (h < top && h >= bot - tol) {
      if (std::abs(h - bot) <= tol) return Landing{s.P(k), k, false};
      return Landing{Vec3(s.X[k], s.y, h), k, true};
    }
  }
  return std::nullopt;
}

struct Builder {
  std::vector<Staircase> stairs;
  std::map<std::pair<int, int>, std::vector<double>> splits;  // (slice, unit) -> heights
  std::vector<SegmentRecord> bridges;
  double factor = 0.5;
  double tol = 1e-9;

  // Horizontal step from P_i of slice a onto slice b. Returns false when the
  // step has no landing point or a negative x increment.
  bool step(int a, int b, int i, SegmentTag tag) {
    const Staircase& sa = stairs[a];
    const Staircase& sb = stairs[b];
    const double scale = std::max(1.0, std::max(sa.L, sb.L));
    const Vec3 from = sa.P(i);
    const auto l = land(sb, from.z(), tol * scale);
    if (!l || l->point.x() - from.x() < -tol * scale) return false;
    Vec3 to = l->point;
    to.z() = from.z();
    if (l->interior) splits[{b, l->unit}].push_back(to.z());
    bridges.push_back(SegmentRecord::make(from, to, tag, a, i, factor * sa.width));
    return true;
  }

  bool support(int a, int b) {
    const int levels = std::max(stairs[a].n(), stairs[b].n());
    for (int i = 1; i <= levels; ++i) {
      if (i <= stairs[a].n() && step(a, b, i, SegmentTag::SupportStrip)) return true;
      if (i <= stairs[b].n() && step(b, a, i, SegmentTag::SupportStrip)) return true;
    }
    return false;
  }

  std::vector<SegmentRecord> panels(int j) const {
    const Staircase& s = stairs[j];
    std::vector<SegmentRecord> out;
    for (int i = 1; i <= s.n(); ++i) {
      out.push_back(SegmentRecord::make(s.P(i - 1), s.C(i), SegmentTag::XPanel, j, i, s.width));
      std::vector<double> hs;
      auto it = splits.find({j, i});
      if (it != splits.end()) hs = it->second;
      std::sort(hs.begin(), hs.end(), std::greater<>());
      hs.erase(std::unique(hs.begin(), hs.end(), [&](double a, double b) { return std::abs(a - b) <= tol; }),
               hs.end());
      Vec3 prev = s.C(i);
      for (double h : hs) {
        const Vec3 p(s.X[i], s.y, h);
        out.push_back(SegmentRecord::make(prev, p, SegmentTag::ZPanel, j, i, s.width));
        prev = p;
      }
      out.push_back(SegmentRecord::make(prev, s.P(i), SegmentTag::ZPanel, j, i, s.width));
    }
    return out;
  }

  std::vector<SegmentRecord> assemble() const {
    std::vector<SegmentRecord> all;
    for (int j = 0; j < static_cast<int>(stairs.size()); ++j) {
      auto p = panels(j);
      all.insert(all.end(), p.begin(), p.end());
    }
    all.insert(all.end(), bridges.begin(), bridges.end());
    std::stable_sort(all.begin(), all.end(), [](const SegmentRecord& a, const SegmentRecord& b) {
      return std::pair(a.slice, a.level) < std::pair(b.slice, b.level);
    });
    return all;
  }
};

Staircase staircase(const SliceDesign& d, double y) {
  Staircase s;
  s.L = d.length;
  s.y = y;
  s.width = d.width;
  s.X.push_back(0.0);
  s.Z.push_back(0.0);
  for (const auto& c : d.cells) {
    s.X.push_back(s.X.back() + c.lx);
    s.Z.push_back(s.Z.back() + c.lz);
  }
  // Close the chain exactly at (L, 0).
  s.X.back() = s.L;
  s.Z.back() = s.L;
  return s;
}

Staircase staircase_from_network(const BranchNetwork& net, int j) {
  Staircase s;
  s.L = net.slice_lengths[j];
  s.y = net.slice_plane(j);
  s.width = net.slice_widths[j];
  s.X.push_back(0.0);
  s.Z.push_back(0.0);
  std::map<int, double> lx;
  std::map<int, double> lz;
  for (const auto& seg : net.segments) {
    if (seg.slice != j) continue;
    if (seg.tag == SegmentTag::XPanel) lx[seg.level] += seg.length;
    if (seg.tag == SegmentTag::ZPanel) lz[seg.level] += seg.length;
  }
  for (const auto& [level, v] : lx) {
    s.X.push_back(s.X.back() + v);
    s.Z.push_back(s.Z.back() + lz[level]);
  }
  return s;
}

}  // namespace

BranchNetwork build_network(std::span<const SliceDesign> designs, const NetworkOptions& options) {
  if (designs.empty()) throw Error(ErrorKind::EmptyNetwork, "no slice designs");
  if (!(options.support_factor > 0)) throw Error(ErrorKind::InvalidConfig, "support factor must be positive");
  BranchNetwork net;
  net.support_factor = options.support_factor;
  Builder b;
  b.factor = options.support_factor;
  b.tol = options.tol;
  double s = 0.0;
  for (const auto& d : designs) {
    if (d.cells.empty()) throw Error(ErrorKind::EmptyNetwork, "slice design without cells");
    net.slice_offsets.push_back(s);
    net.slice_widths.push_back(d.width);
    net.slice_lengths.push_back(d.length);
    b.stairs.push_back(staircase(d, s + 0.5 * d.width));
    s += d.width;
  }
  const int ns = static_cast<int>(designs.size());
  int pairs = 0;
  int dead = 0;
  for (int j = 0; j < ns; j += 2) {
    Branch br;
    br.first_slice = j;
    if (j + 1 < ns) {
      br.second_slice = j + 1;
      ++pairs;
      int here = j;
      int there = j + 1;
      // Start from the shorter chain so the first step moves forward in x.
      const double lscale = std::max(1.0, std::max(b.stairs[j].L, b.stairs[j + 1].L));
      if (b.stairs[there].L < b.stairs[here].L - b.tol * lscale) {
        std::swap(here, there);
        br.first_slice = here;
        br.second_slice = there;
      }
      for (int i = 1; i <= b.stairs[here].n(); ++i) {
        if (!b.step(here, there, i, SegmentTag::Separation)) {
          br.terminated_at = i;
          break;
        }
        ++br.levels;
        std::swap(here, there);
      }
      if (br.levels == 0) ++dead;
    }
    net.branches.push_back(br);
  }
  if (pairs > 0 && dead == pairs) {
    throw Error(ErrorKind::EmptyNetwork, "every branch terminates at its first step");
  }
  for (int k = 1; k + 1 < ns; k += 2) b.support(k, k + 1);
  net.segments = b.assemble();
  return net;
}

BranchNetwork stitch_networks(std::span<const BranchNetwork> patches, const NetworkOptions& options) {
  if (patches.empty()) throw Error(ErrorKind::EmptyNetwork, "no patches to stitch");
  BranchNetwork out;
  out.support_factor = options.support_factor;
  std::vector<int> first_slice;
  double y0 = 0.0;
  int j0 = 0;
  for (const auto& p : patches) {
    first_slice.push_back(j0);
    for (auto seg : p.segments) {
      seg.start.y() += y0;
      seg.end.y() += y0;
      seg.slice += j0;
      out.segments.push_back(seg);
    }
    for (int j = 0; j < p.num_slices(); ++j) {
      out.slice_widths.push_back(p.slice_widths[j]);
      out.slice_offsets.push_back(p.slice_offsets[j] + y0);
      out.slice_lengths.push_back(p.slice_lengths[j]);
    }
    for (auto br : p.branches) {
      br.first_slice += j0;
      if (br.second_slice >= 0) br.second_slice += j0;
      out.branches.push_back(br);
    }
    double w = 0.0;
    for (double v : p.slice_widths) w += v;
    y0 += w;
    j0 += p.num_slices();
  }
  Builder b;
  b.factor = options.support_factor;
  b.tol = options.tol;
  for (int j = 0; j < out.num_slices(); ++j) b.stairs.push_back(staircase_from_network(out, j));
  for (std::size_t p = 1; p < patches.size(); ++p) {
    const int k = first_slice[p] - 1;
    if (!b.support(k, k + 1)) {
      std::ostringstream msg;
      msg << "patches " << p - 1 << " and " << p << " have no horizontal link between slices " << k << " and "
          << k + 1;
      throw Error(ErrorKind::StitchMismatch, msg.str());
    }
  }
  // Stitch strips may split z-panels of the boundary slices.
  std::vector<SegmentRecord> rebuilt;
  for (const auto& seg : out.segments) {
    const bool boundary_panel =
        (seg.tag == SegmentTag::ZPanel) && b.splits.count({seg.slice, seg.level}) != 0;
    if (!boundary_panel) {
      rebuilt.push_back(seg);
      continue;
    }
    std::vector<double> hs;
    for (double h : b.splits.at({seg.slice, seg.level})) {
      const double hi = std::max(seg.start.z(), seg.end.z());
      const double lo = std::min(seg.start.z(), seg.end.z());
      if (h < hi - options.tol && h > lo + options.tol) hs.push_back(h);
    }
    std::sort(hs.begin(), hs.end(), std::greater<>());
    Vec3 prev = seg.start;
    for (double h : hs) {
      const Vec3 p(seg.start.x(), seg.start.y(), h);
      rebuilt.push_back(SegmentRecord::make(prev, p, seg.tag, seg.slice, seg.level, seg.width));
      prev = p;
    }
    rebuilt.push_back(SegmentRecord::make(prev, seg.end, seg.tag, seg.slice, seg.level, seg.width));
  }
  rebuilt.insert(rebuilt.end(), b.bridges.begin(), b.bridges.end());
  std::stable_sort(rebuilt.begin(), rebuilt.end(), [](const SegmentRecord& a, const SegmentRecord& c) {
    return std::pair(a.slice, a.level) < std::pair(c.slice, c.level);
  });
  out.segments = std::move(rebuilt);
  return out;
}

namespace {

[[noreturn]] void broken(double psi, const std::string& what) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "at psi = " << psi << ": " << what;
  throw Error(ErrorKind::TopologyBroken, msg.str());
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol) {
  auto shared = [&](const Vec2& a) { return (a - q1).norm() <= tol || (a - q2).norm() <= tol; };
  const Vec2 r = p2 - p1;
  const Vec2 s = q2 - q1;
  const double den = cross2(r, s);
  if (std::abs(den) <= tol * r.norm() * s.norm()) {
    // Parallel: only collinear overlap of positive length counts.
    if (std::abs(cross2(q1 - p1, r)) > tol * r.norm()) return false;
    const double rr = r.squaredNorm();
    const double t0 = (q1 - p1).dot(r) / rr;
    const double t1 = (q2 - p1).dot(r) / rr;
    const double lo = std::max(0.0, std::min(t0, t1));
    const double hi = std::min(1.0, std::max(t0, t1));
    return (hi - lo) * std::sqrt(rr) > tol;
  }
  if (shared(p1) || shared(p2)) return false;
  const double t = cross2(q1 - p1, s) / den;
  const double u = cross2(q1 - p1, r) / den;
  const double e = 1e-12;
  return t > e && t < 1 - e && u > e && u < 1 - e;
}

}  // namespace

TopologyReport validate_topology(const BranchNetwork& network, std::span<const double> psi_samples) {
  static const double kDefault[] = {0.0, kPi / 4, kPi / 2};
  if (psi_samples.empty()) psi_samples = kDefault;
  TopologyReport rep;
  rep.segments = static_cast<int>(network.segments.size());
  const auto g = network.graph();
  rep.nodes = static_cast<int>(g.nodes.size());
  rep.connected = network.connected();
  double scale = 1.0;
  for (double L : network.slice_lengths) scale = std::max(scale, L);
  const double tol = 1e-9 * scale;

  for (double psi : psi_samples) {
    rep.psi_checked.push_back(psi);
    if (!rep.connected) broken(psi, "segment graph is not connected");
    const DeploymentAngle a(psi);
    // Adjacency: shared nodes stay shared.
    std::vector<Vec3> mapped;
    for (const auto& n : g.nodes) mapped.push_back(deploy_point(n, a));
    std::vector<SegmentRecord> dep;
    for (std::size_t k = 0; k < network.segments.size(); ++k) {
      const auto& s = network.segments[k];
      const SegmentRecord d = deploy_segment(s, psi);
      const auto [na, nb] = g.edges[k];
      if ((d.start - mapped[na]).norm() > tol || (d.end - mapped[nb]).norm() > tol) {
        broken(psi, "segment " + std::to_string(k) + " detaches from its nodes");
      }
      const double err = std::abs(d.length - s.length);
      rep.max_length_error = std::max(rep.max_length_error, err);
      if (err > tol) broken(psi, "segment " + std::to_string(k) + " changes length");
      const Vec3 dir = d.end - d.start;
      if (s.tag == SegmentTag::XPanel && dir.x() < -tol) {
        broken(psi, "ordering violated by x-panel " + std::to_string(k) + " of slice " + std::to_string(s.slice));
      }
      const Vec3 wall(std::cos(psi), 0.0, std::sin(psi));
      if (s.tag == SegmentTag::ZPanel && dir.dot(wall) > tol) {
        broken(psi, "ordering violated by z-panel " + std::to_string(k) + " of slice " + std::to_string(s.slice));
      }
      dep.push_back(d);
    }
    if (std::sin(psi) < 1e-9) continue;  // the flat state folds every plane onto a line
    for (int j = 0; j < network.num_slices(); ++j) {
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k < dep.size(); ++k) {
        const auto t = dep[k].tag;
        if (dep[k].slice == j && (t == SegmentTag::XPanel || t == SegmentTag::ZPanel)) idx.push_back(k);
      }
      for (std::size_t u = 0; u < idx.size(); ++u) {
        for (std::size_t v = u + 1; v < idx.size(); ++v) {
          const auto& p = dep[idx[u]];
          const auto& q = dep[idx[v]];
          ++rep.crossings_checked;
          if (segments_cross({p.start.x(), p.start.z()}, {p.end.x(), p.end.z()}, {q.start.x(), q.start.z()},
                             {q.end.x(), q.end.z()}, tol)) {
            broken(psi, "segments " + std::to_string(idx[u]) + " and " + std::to_string(idx[v]) + " cross in slice " +
                            std::to_string(j));
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace popup
