#include "popup/stl.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "popup/errors.hpp"
#include "popup/io.hpp"

namespace popup {

namespace {

Vec3 facet_normal(const TriMesh& mesh, std::size_t f) {
  const Vec3 n = mesh.face_normal(f);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f32(std::string& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

}  // namespace

std::string stl_text(const TriMesh& mesh, const std::string& name) {
  std::ostringstream os;
  os << std::setprecision(9);
  os << "solid " << name << "\n";
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = facet_normal(mesh, f);
    os << "  facet normal " << n.x() << " " << n.y() << " " << n.z() << "\n    outer loop\n";
    for (int v : mesh.faces[f]) {
      const Vec3& p = mesh.vertices[v];
      os << "      vertex " << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid " << name << "\n";
  return os.str();
}

std::string stl_binary(const TriMesh& mesh, const std::string& header) {
  std::string out(80, '\0');
  std::memcpy(out.data(), header.data(), std::min<std::size_t>(header.size(), 80));
  put_u32(out, static_cast<std::uint32_t>(mesh.faces.size()));
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = facet_normal(mesh, f);
    for (int i = 0; i < 3; ++i) put_f32(out, n(i));
    for (int v : mesh.faces[f]) {
      for (int i = 0; i < 3; ++i) put_f32(out, mesh.vertices[v](i));
    }
    out.push_back('\0');
    out.push_back('\0');
  }
  return out;
}

FrameExport write_frames(const std::filesystem::path& dir, std::span<const TriMesh> frames,
                         std::span<const double> psi, bool text, double scale_cm) {
  if (frames.size() != psi.size()) throw Error(ErrorKind::InvalidConfig, "one angle per frame required");
  ensure_directory(dir);
  FrameExport out;
  std::ostringstream meta;
  meta << std::setprecision(12);
  meta << "format = " << (text ? "stl-txt" : "stl-bin") << "\n";
  meta << "units = sheet\n";
  meta << "scale_cm_per_unit = " << scale_cm << "\n";
  meta << "frames = " << frames.size() << "\n";
  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << k + 1 << ".stl";
    const auto path = dir / name.str();
    std::ostringstream title;
    title << "popup frame " << k + 1 << " psi " << std::setprecision(9) << psi[k];
    write_file_atomic(path, text ? stl_text(frames[k], "frame_" + std::to_string(k + 1)) : stl_binary(frames[k], title.str()));
    out.files.push_back(path);
    meta << "frame_" << k + 1 << " = " << name.str() << " psi " << psi[k] << " hash " << std::hex
         << frames[k].connectivity_hash() << std::dec << "\n";
  }
  out.metadata = dir / "frames.meta";
  write_file_atomic(out.metadata, meta.str());
  return out;
}

}  // namespace popup
