#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "popup/tri_mesh.hpp"

namespace popup {

/// ASCII facet format; normals from face winding.
std::string stl_text(const TriMesh& mesh, const std::string& name = "popup");

/// 80-byte header, facet count, 50 bytes per facet (little endian floats).
std::string stl_binary(const TriMesh& mesh, const std::string& header = "popup");

struct FrameExport {
  std::vector<std::filesystem::path> files;
  std::filesystem::path metadata;
};

/// Writes frame_0001.stl ... and frames.meta (units, scale, angles,
/// connectivity hash). Binary unless `text` is set.
FrameExport write_frames(const std::filesystem::path& dir, std::span<const TriMesh> frames,
                         std::span<const double> psi, bool text = false, double scale_cm = 1.0);

}  // namespace popup
