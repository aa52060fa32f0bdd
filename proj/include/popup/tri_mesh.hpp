#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "popup/types.hpp"

namespace popup {

using Face = std::array<int, 3>;

/// Triangle mesh with area-weighted vertex normals.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> vertex_normals;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_faces() const { return faces.size(); }

  /// Recomputes vertex_normals as the normalized sum of incident face
  /// cross products (i.e. area weighted).
  void compute_normals();

  Vec3 face_normal(std::size_t f) const;
  double face_area(std::size_t f) const;
  double total_area() const;

  /// Throws InvalidAssembly on out-of-range indices, faces with area below
  /// `area_tol`, or normals that are not unit length to 1e-10.
  void validate(double area_tol = 1e-12) const;

  /// FNV-1a hash of the face index list; equal for meshes with identical
  /// connectivity regardless of vertex positions.
  std::uint64_t connectivity_hash() const;
};

/// Closed or open one-ring around a vertex, ring ordered counterclockwise
/// about the center normal.
struct VertexStar {
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> ring;
  bool closed = true;
};

/// Ordered one-ring of `vertex` taken from the mesh face orientation.
/// Boundary vertices produce an open star.
VertexStar vertex_star(const TriMesh& mesh, int vertex);

/// Indices of the ring vertices of `vertex` in star order.
std::vector<int> one_ring(const TriMesh& mesh, int vertex, bool* closed = nullptr);

/// Fan mesh of a star: center is vertex 0, ring follows.
TriMesh star_mesh(const VertexStar& star);

/// Icosahedron subdivided `levels` times and projected to a sphere.
TriMesh icosphere(double radius, int levels);

/// Open cylinder of radius r, `around` segments, `rows` rings along [0, height].
TriMesh cylinder_mesh(double radius, double height, int around, int rows);

/// Regular triangulated grid of the unit square in the z = 0 plane.
TriMesh grid_mesh(int nx, int ny, double spacing);

}  // namespace popup
