#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace cipimex {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

using Triangle = std::array<std::size_t, 3>;

/// Edge shared by two triangles. `normal` is the outward unit normal of `left`.
struct InteriorFace {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  Point2 normal;
  double length = 0.0;
};

struct BoundaryFace {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t tri = 0;
  Point2 normal;  // outward
  double length = 0.0;
  int marker = 0;
};

/// Side markers used by the square generator.
namespace marker {
inline constexpr int disc = 0;
inline constexpr int left = 1;
inline constexpr int right = 2;
inline constexpr int bottom = 3;
inline constexpr int top = 4;
}  // namespace marker

/// Raw input for build_face_connectivity: boundary markers are matched by
/// node pair; unmatched boundary edges get marker 0.
struct BoundaryTag {
  std::size_t a = 0;
  std::size_t b = 0;
  int marker = 0;
};

/// Conforming triangulation with full face connectivity. Immutable once built.
///
/// Edges carry a global id: interior faces take ids [0, n_interior) and
/// boundary faces [n_interior, n_interior + n_boundary). Local edge k of a
/// triangle joins vertex k to vertex (k+1)%3.
class TriMesh {
public:
  TriMesh() = default;

  const std::vector<Point2>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }
  const std::array<std::size_t, 3>& triangle_edges(std::size_t t) const { return triangle_edges_[t]; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return interior_faces_.size() + boundary_faces_.size(); }

  /// Endpoints (a, b) of a global edge id.
  std::array<std::size_t, 2> edge_nodes(std::size_t edge) const;
  bool is_boundary_edge(std::size_t edge) const { return edge >= interior_faces_.size(); }

  double signed_area(std::size_t t) const;
  Point2 centroid(std::size_t t) const;

  friend TriMesh build_face_connectivity(std::vector<Point2> nodes, std::vector<Triangle> triangles,
                                         std::span<const BoundaryTag> tags);

private:
  std::vector<Point2> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<std::array<std::size_t, 3>> triangle_edges_;
};

/// Builds interior/boundary face lists. Triangles with negative orientation are
/// reordered to counter-clockwise. Throws MalformedMesh for bad indices,
/// degenerate triangles or edges shared by more than two triangles.
TriMesh build_face_connectivity(std::vector<Point2> nodes, std::vector<Triangle> triangles,
                                std::span<const BoundaryTag> tags = {});

/// Uniform nele x nele grid on [0,1]^2, every cell cut along the
/// lower-left to upper-right diagonal.
TriMesh generate_square_mesh(std::size_t nele);

/// Concentric-ring triangulation of the unit disc with nele boundary edges.
TriMesh generate_disc_mesh(std::size_t nele);

TriMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

struct MeshStatistics {
  double h_max = 0.0;
  double h_min = 0.0;
  double min_angle = 0.0;  // degrees
  double area = 0.0;
};

MeshStatistics mesh_statistics(const TriMesh& mesh);

}  // namespace cipimex
