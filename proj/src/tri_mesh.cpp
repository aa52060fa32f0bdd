#include "popup/tri_mesh.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <map>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

Vec3 TriMesh::face_normal(std::size_t f) const {
  const auto& [a, b, c] = faces[f];
  return (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
}

double TriMesh::face_area(std::size_t f) const { return 0.5 * face_normal(f).norm(); }

double TriMesh::total_area() const {
  double area = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) area += face_area(f);
  return area;
}

void TriMesh::compute_normals() {
  vertex_normals.assign(vertices.size(), Vec3::Zero());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Vec3 n = face_normal(f);
    for (int v : faces[f]) vertex_normals[v] += n;
  }
  for (auto& n : vertex_normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
}

void TriMesh::validate(double area_tol) const {
  const int nv = static_cast<int>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int v : faces[f]) {
      if (v < 0 || v >= nv) {
        std::ostringstream msg;
        msg << "face " << f << " references vertex " << v << " of " << nv;
        throw Error(ErrorKind::InvalidAssembly, msg.str());
      }
    }
    if (face_area(f) <= area_tol) {
      std::ostringstream msg;
      msg << "face " << f << " is degenerate (area " << face_area(f) << ")";
      throw Error(ErrorKind::InvalidAssembly, msg.str());
    }
  }
  if (!vertex_normals.empty()) {
    if (vertex_normals.size() != vertices.size()) {
      throw Error(ErrorKind::InvalidAssembly, "normal count differs from vertex count");
    }
    for (std::size_t v = 0; v < vertex_normals.size(); ++v) {
      if (std::abs(vertex_normals[v].norm() - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "vertex normal " << v << " is not unit length";
        throw Error(ErrorKind::InvalidAssembly, msg.str());
      }
    }
  }
}

std::uint64_t TriMesh::connectivity_hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(vertices.size());
  for (const auto& f : faces) {
    for (int v : f) mix(static_cast<std::uint64_t>(v));
  }
  return h;
}

std::vector<int> one_ring(const TriMesh& mesh, int vertex, bool* closed) {
  // Each incident face (vertex, a, b) contributes the directed edge a -> b.
  std::map<int, int> next;
  std::map<int, int> prev;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[k] == vertex) {
        const int a = f[(k + 1) % 3];
        const int b = f[(k + 2) % 3];
        next[a] = b;
        prev[b] = a;
      }
    }
  }
  std::vector<int> ring;
  if (next.empty()) {
    if (closed) *closed = false;
    return ring;
  }
  // Open fans start at the vertex without a predecessor.
  int start = next.begin()->first;
  bool is_closed = true;
  for (const auto& [a, b] : next) {
    if (!prev.contains(a)) {
      start = a;
      is_closed = false;
      break;
    }
  }
  int cur = start;
  for (std::size_t guard = 0; guard <= next.size(); ++guard) {
    ring.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) break;
    cur = it->second;
    if (cur == start) break;
  }
  if (closed) *closed = is_closed;
  return ring;
}

VertexStar vertex_star(const TriMesh& mesh, int vertex) {
  VertexStar star;
  star.center = mesh.vertices.at(vertex);
  bool closed = false;
  for (int v : one_ring(mesh, vertex, &closed)) star.ring.push_back(mesh.vertices[v]);
  star.closed = closed;
  return star;
}

TriMesh star_mesh(const VertexStar& star) {
  TriMesh mesh;
  mesh.vertices.push_back(star.center);
  for (const auto& v : star.ring) mesh.vertices.push_back(v);
  const int k = static_cast<int>(star.ring.size());
  const int nf = star.closed ? k : k - 1;
  for (int i = 0; i < nf; ++i) mesh.faces.push_back({0, 1 + i, 1 + (i + 1) % k});
  mesh.compute_normals();
  return mesh;
}

TriMesh icosphere(double radius, int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : mesh.vertices) v = v.normalized();

  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const auto& [a, b, c] : mesh.faces) {
      const int ab = mid(a, b);
      const int bc = mid(b, c);
      const int ca = mid(c, a);
      faces.push_back({a, ab, ca});
      faces.push_back({b, bc, ab});
      faces.push_back({c, ca, bc});
      faces.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(faces);
  }
  for (auto& v : mesh.vertices) v *= radius;
  mesh.compute_normals();
  return mesh;
}

TriMesh cylinder_mesh(double radius, double height, int around, int rows) {
  TriMesh mesh;
  for (int r = 0; r <= rows; ++r) {
    // Alternate rows are rotated by half a segment to keep triangles well shaped.
    const double shift = (r % 2) * 0.5;
    for (int a = 0; a < around; ++a) {
      const double th = 2.0 * kPi * (a + shift) / around;
      mesh.vertices.emplace_back(radius * std::cos(th), radius * std::sin(th), height * r / rows);
    }
  }
  auto id = [around](int r, int a) { return r * around + ((a % around) + around) % around; };
  for (int r = 0; r < rows; ++r) {
    for (int a = 0; a < around; ++a) {
      if (r % 2 == 0) {
        mesh.faces.push_back({id(r, a), id(r, a + 1), id(r + 1, a)});
        mesh.faces.push_back({id(r, a + 1), id(r + 1, a + 1), id(r + 1, a)});
      } else {
        mesh.faces.push_back({id(r, a), id(r + 1, a + 1), id(r + 1, a)});
        mesh.faces.push_back({id(r, a), id(r, a + 1), id(r + 1, a + 1)});
      }
    }
  }
  mesh.compute_normals();
  return mesh;
}

TriMesh grid_mesh(int nx, int ny, double spacing) {
  TriMesh mesh;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(i * spacing, j * spacing, 0.0);
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  mesh.compute_normals();
  return mesh;
}

}  // namespace popup
