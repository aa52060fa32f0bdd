#include "popup/deployment.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <sstream>
#include <thread>

#include "popup/errors.hpp"

namespace popup {

void DeploymentSchedule::validate() const {
  if (frames < 2) throw Error(ErrorKind::InvalidConfig, "deployment schedule needs at least 2 frames");
}

std::vector<double> DeploymentSchedule::angles() const {
  validate();
  std::vector<double> out;
  for (int k = 0; k < frames; ++k) out.push_back(k == frames - 1 ? kPi / 2 : (kPi / 2) * k / (frames - 1));
  return out;
}

namespace {

Vec3 width_direction(const SegmentRecord& s) {
  if (s.tag == SegmentTag::XPanel || s.tag == SegmentTag::ZPanel) return Vec3::UnitY();
  const Vec3 d = s.end - s.start;
  const Vec3 e(-d.y(), d.x(), 0.0);
  if (e.norm() > 1e-12 * std::max(1.0, d.norm())) return e.normalized();
  return Vec3::UnitY().cross(d).normalized();
}

}  // namespace

TriMesh thicken_to_mesh(const BranchNetwork& network, std::span<const double> widths, double psi) {
  if (widths.size() != network.segments.size()) {
    throw Error(ErrorKind::InvalidConfig, "one width per segment required");
  }
  const DeploymentAngle a(psi);
  TriMesh mesh;
  mesh.vertices.reserve(4 * network.segments.size());
  mesh.faces.reserve(2 * network.segments.size());
  for (std::size_t k = 0; k < network.segments.size(); ++k) {
    const auto& s = network.segments[k];
    if (!(s.length > 0.0) || !(widths[k] > 0.0)) {
      std::ostringstream msg;
      msg << to_string(s.tag) << " segment " << k << " of slice " << s.slice << " has length " << s.length
          << " and width " << widths[k];
      throw Error(ErrorKind::DegeneratePanel, msg.str());
    }
    const Vec3 e = 0.5 * widths[k] * width_direction(s);
    const int base = static_cast<int>(mesh.vertices.size());
    for (const Vec3& p : {Vec3(s.start - e), Vec3(s.start + e), Vec3(s.end + e), Vec3(s.end - e)}) {
      mesh.vertices.push_back(deploy_point(p, a));
    }
    mesh.faces.push_back({base, base + 1, base + 2});
    mesh.faces.push_back({base, base + 2, base + 3});
  }
  mesh.compute_normals();
  return mesh;
}

TriMesh thicken_to_mesh(const BranchNetwork& network, double psi) {
  std::vector<double> widths;
  for (const auto& s : network.segments) widths.push_back(s.width);
  return thicken_to_mesh(network, widths, psi);
}

double panel_area(const BranchNetwork& network) {
  double a = 0.0;
  for (const auto& s : network.segments) a += s.length * s.width;
  return a;
}

std::vector<TriMesh> deployment_frames(const BranchNetwork& network, const DeploymentSchedule& schedule) {
  const auto psi = schedule.angles();
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double one[] = {psi[k]};
    try {
      validate_topology(network, one);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "frame " << k + 1 << ": " << e.what();
      throw Error(ErrorKind::TopologyBroken, msg.str());
    }
  }
  std::vector<TriMesh> frames(psi.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(psi.size(), std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < psi.size(); k += workers) frames[k] = thicken_to_mesh(network, psi[k]);
      });
    }
  }
  return frames;
}

}  // namespace popup
