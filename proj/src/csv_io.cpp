#include "popup/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

namespace {

std::ostringstream number_stream(int digits = 9) {
  std::ostringstream os;
  os.precision(digits);
  return os;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string network_csv(const BranchNetwork& network) {
  auto os = number_stream();
  os << "tag,x1,y1,z1,x2,y2,z2,length,slice,level\n";
  for (const auto& s : network.segments) {
    os << to_string(s.tag) << ',' << s.start.x() << ',' << s.start.y() << ',' << s.start.z() << ',' << s.end.x()
       << ',' << s.end.y() << ',' << s.end.z() << ',' << s.length << ',' << s.slice << ',' << s.level << '\n';
  }
  return os.str();
}

BranchNetwork parse_network_csv(const std::string& text, double support_factor) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "tag,x1,y1,z1,x2,y2,z2,length,slice,level") {
    throw Error(ErrorKind::InvalidConfig, "network CSV: unexpected header");
  }
  BranchNetwork net;
  net.support_factor = support_factor;
  std::map<int, double> plane;
  std::map<int, double> top;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) {
      throw Error(ErrorKind::InvalidConfig, "network CSV line " + std::to_string(lineno) + ": expected 10 fields");
    }
    SegmentRecord s;
    try {
      s.tag = parse_tag(f[0]);
      s.start = Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3]));
      s.end = Vec3(std::stod(f[4]), std::stod(f[5]), std::stod(f[6]));
      s.length = std::stod(f[7]);
      s.slice = std::stoi(f[8]);
      s.level = std::stoi(f[9]);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidConfig, "network CSV line " + std::to_string(lineno) + ": bad number");
    }
    if (s.slice < 0) throw Error(ErrorKind::InvalidConfig, "network CSV: negative slice index");
    // The length column is rounded like the coordinates; the endpoints are
    // authoritative so deployed lengths compare against the same numbers.
    const double len = (s.end - s.start).norm();
    if (std::abs(len - s.length) > 1e-6 * std::max(1.0, len)) {
      throw Error(ErrorKind::InvalidConfig,
                  "network CSV line " + std::to_string(lineno) + ": length column disagrees with endpoints");
    }
    s.length = len;
    if (s.tag == SegmentTag::XPanel || s.tag == SegmentTag::ZPanel) {
      plane[s.slice] = s.start.y();
      top[s.slice] = std::max({top[s.slice], s.start.z(), s.end.z()});
    }
    net.segments.push_back(s);
  }
  if (net.segments.empty()) throw Error(ErrorKind::EmptyNetwork, "network CSV has no segments");
  const int ns = plane.empty() ? 0 : plane.rbegin()->first + 1;
  double s0 = 0.0;
  for (int j = 0; j < ns; ++j) {
    if (!plane.count(j)) throw Error(ErrorKind::InvalidConfig, "network CSV: slice " + std::to_string(j) + " has no panels");
    const double w = 2.0 * (plane[j] - s0);
    if (!(w > 0)) throw Error(ErrorKind::InvalidConfig, "network CSV: slice planes are not increasing");
    net.slice_offsets.push_back(s0);
    net.slice_widths.push_back(w);
    net.slice_lengths.push_back(top[j]);
    s0 += w;
  }
  for (auto& s : net.segments) {
    if (s.slice >= ns) throw Error(ErrorKind::InvalidConfig, "network CSV: bridge from a slice without panels");
    const double w = net.slice_widths[s.slice];
    s.width = (s.tag == SegmentTag::XPanel || s.tag == SegmentTag::ZPanel) ? w : support_factor * w;
  }
  return net;
}

std::string curvature_grid_csv(const CurvatureMap& map) {
  auto os = number_stream(12);
  os << "r,lambda,phi,K,H,valid\n";
  for (const auto& s : map.samples) {
    os << s.r << ',' << s.lambda << ',' << s.phi << ',';
    if (s.valid) {
      os << s.K << ',' << s.H << ",1\n";
    } else {
      os << "nan,nan,0\n";
    }
  }
  return os.str();
}

std::string contour_csv(const CurvatureMap& map) {
  auto os = number_stream(12);
  os << "field,phi,r1,lambda1,r2,lambda2\n";
  for (const auto& c : map.contours) {
    os << c.field << ',' << c.phi << ',' << c.a.x() << ',' << c.a.y() << ',' << c.b.x() << ',' << c.b.y() << '\n';
  }
  return os.str();
}

std::string trace_csv(const CurvatureTrace& trace) {
  auto os = number_stream(12);
  os << "psi,K\n";
  for (const auto& p : trace.samples) os << p.psi << ',' << p.K << '\n';
  for (double psi : trace.sign_changes) os << "# sign_change," << psi << '\n';
  return os.str();
}

}  // namespace popup
