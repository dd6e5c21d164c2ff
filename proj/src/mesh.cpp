#include "cipimex/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "cipimex/errors.hpp"

namespace cipimex {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey make_key(std::size_t a, std::size_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Outward unit normal of the directed edge a->b of a counter-clockwise triangle.
Point2 outward_normal(Point2 pa, Point2 pb) {
  const Point2 d = pb - pa;
  const double len = norm(d);
  return {d.y / len, -d.x / len};
}

}  // namespace

std::array<std::size_t, 2> TriMesh::edge_nodes(std::size_t edge) const {
  if (edge < interior_faces_.size()) {
    const auto& f = interior_faces_[edge];
    return {f.a, f.b};
  }
  const auto& f = boundary_faces_.at(edge - interior_faces_.size());
  return {f.a, f.b};
}

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2 p0 = nodes_[tri[0]], p1 = nodes_[tri[1]], p2 = nodes_[tri[2]];
  return 0.5 * cross(p1 - p0, p2 - p0);
}

Point2 TriMesh::centroid(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2 s = nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]];
  return (1.0 / 3.0) * s;
}

TriMesh build_face_connectivity(std::vector<Point2> nodes, std::vector<Triangle> triangles,
                                std::span<const BoundaryTag> tags) {
  TriMesh mesh;
  const std::size_t n_nodes = nodes.size();
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    auto& tri = triangles[t];
    for (std::size_t v : tri) {
      if (v >= n_nodes) {
        throw MalformedMesh("triangle " + std::to_string(t) + " references node " + std::to_string(v) +
                            " but the mesh has " + std::to_string(n_nodes) + " nodes");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MalformedMesh("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const double a2 = cross(nodes[tri[1]] - nodes[tri[0]], nodes[tri[2]] - nodes[tri[0]]);
    if (a2 == 0.0) {
      throw MalformedMesh("triangle " + std::to_string(t) + " is degenerate");
    }
    if (a2 < 0.0) std::swap(tri[1], tri[2]);
  }

  // Edge -> (triangle, local edge) incidences, in deterministic key order.
  std::map<EdgeKey, std::vector<std::pair<std::size_t, int>>> incidence;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto key = make_key(triangles[t][k], triangles[t][(k + 1) % 3]);
      auto& inc = incidence[key];
      inc.emplace_back(t, k);
      if (inc.size() > 2) {
        throw MalformedMesh("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                            ") is shared by more than two triangles");
      }
    }
  }

  std::map<EdgeKey, int> tag_map;
  for (const auto& tag : tags) tag_map[make_key(tag.a, tag.b)] = tag.marker;

  mesh.triangle_edges_.assign(triangles.size(), {0, 0, 0});
  std::vector<std::pair<std::size_t, int>> boundary_incidence;
  for (const auto& [key, inc] : incidence) {
    if (inc.size() == 1) {
      boundary_incidence.push_back(inc.front());
      continue;
    }
    const auto [t0, k0] = inc[0];
    const auto [t1, k1] = inc[1];
    InteriorFace face;
    face.a = triangles[t0][k0];
    face.b = triangles[t0][(k0 + 1) % 3];
    face.left = t0;
    face.right = t1;
    face.normal = outward_normal(nodes[face.a], nodes[face.b]);
    face.length = norm(nodes[face.b] - nodes[face.a]);
    mesh.triangle_edges_[t0][k0] = mesh.interior_faces_.size();
    mesh.triangle_edges_[t1][k1] = mesh.interior_faces_.size();
    mesh.interior_faces_.push_back(face);
  }
  const std::size_t n_interior = mesh.interior_faces_.size();
  for (const auto& [t, k] : boundary_incidence) {
    BoundaryFace face;
    face.a = triangles[t][k];
    face.b = triangles[t][(k + 1) % 3];
    face.tri = t;
    face.normal = outward_normal(nodes[face.a], nodes[face.b]);
    face.length = norm(nodes[face.b] - nodes[face.a]);
    if (auto it = tag_map.find(make_key(face.a, face.b)); it != tag_map.end()) face.marker = it->second;
    mesh.triangle_edges_[t][k] = n_interior + mesh.boundary_faces_.size();
    mesh.boundary_faces_.push_back(face);
  }

  mesh.nodes_ = std::move(nodes);
  mesh.triangles_ = std::move(triangles);
  return mesh;
}

TriMesh generate_square_mesh(std::size_t nele) {
  if (nele == 0) throw InvalidArgument("generate_square_mesh: nele must be >= 1");
  const std::size_t np = nele + 1;
  std::vector<Point2> nodes;
  nodes.reserve(np * np);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(nele);
      const double y = static_cast<double>(j) / static_cast<double>(nele);
      nodes.push_back({x, y});
    }
  }
  auto id = [np](std::size_t i, std::size_t j) { return i + np * j; };

  std::vector<Triangle> tris;
  tris.reserve(2 * nele * nele);
  for (std::size_t j = 0; j < nele; ++j) {
    for (std::size_t i = 0; i < nele; ++i) {
      const std::size_t ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      tris.push_back({ll, lr, ur});
      tris.push_back({ll, ur, ul});
    }
  }

  std::vector<BoundaryTag> tags;
  for (std::size_t s = 0; s < nele; ++s) {
    tags.push_back({id(0, s), id(0, s + 1), marker::left});
    tags.push_back({id(nele, s), id(nele, s + 1), marker::right});
    tags.push_back({id(s, 0), id(s + 1, 0), marker::bottom});
    tags.push_back({id(s, nele), id(s + 1, nele), marker::top});
  }
  return build_face_connectivity(std::move(nodes), std::move(tris), tags);
}

TriMesh generate_disc_mesh(std::size_t nele) {
  if (nele < 8) throw InvalidArgument("generate_disc_mesh: nele must be >= 8");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double dn = static_cast<double>(nele);
  const auto rings = static_cast<std::size_t>(std::max(1.0, std::round(dn / two_pi)));

  std::vector<Point2> nodes{{0.0, 0.0}};
  // ring_start[j], ring_size[j] for rings 1..K; ring 0 is the centre node
  std::vector<std::size_t> ring_start(rings + 1, 0), ring_size(rings + 1, 1);
  std::vector<double> ring_offset(rings + 1, 0.0);
  for (std::size_t j = 1; j <= rings; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(rings);
    const auto count = static_cast<std::size_t>(
        std::max(3.0, std::round(dn * static_cast<double>(j) / static_cast<double>(rings))));
    const double spacing = two_pi / static_cast<double>(count);
    ring_start[j] = nodes.size();
    ring_size[j] = count;
    ring_offset[j] = 0.5 * spacing * static_cast<double>(j);
    for (std::size_t k = 0; k < count; ++k) {
      const double theta = ring_offset[j] + spacing * static_cast<double>(k);
      if (j == rings) {
        nodes.push_back({std::cos(theta), std::sin(theta)});
      } else {
        nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
      }
    }
  }

  std::vector<Triangle> tris;
  // centre fan
  for (std::size_t k = 0; k < ring_size[1]; ++k) {
    tris.push_back({0, ring_start[1] + k, ring_start[1] + (k + 1) % ring_size[1]});
  }
  // angular sweep between ring j-1 and ring j
  for (std::size_t j = 2; j <= rings; ++j) {
    const std::size_t n_in = ring_size[j - 1], n_out = ring_size[j];
    const double s_out = two_pi / static_cast<double>(n_out);
    const double a0 = ring_offset[j - 1];
    // first outer node at or after a0 - s_out/2, unwrapped relative to a0
    double b0 = ring_offset[j];
    std::size_t m0 = 0;
    while (b0 < a0 - 0.5 * s_out) {
      b0 += s_out;
      ++m0;
    }
    while (b0 >= a0 + 0.5 * s_out) {
      b0 -= s_out;
      m0 = (m0 + n_out - 1) % n_out;
    }
    auto inner = [&](std::size_t i) { return ring_start[j - 1] + i % n_in; };
    auto outer = [&](std::size_t m) { return ring_start[j] + (m0 + m) % n_out; };
    // advance the side whose new diagonal is shorter
    std::size_t i = 0, m = 0;
    while (i < n_in || m < n_out) {
      const double d_in = norm(nodes[inner(i + 1)] - nodes[outer(m)]);
      const double d_out = norm(nodes[outer(m + 1)] - nodes[inner(i)]);
      if (m == n_out || (i < n_in && d_in < d_out)) {
        tris.push_back({inner(i), outer(m), inner(i + 1)});
        ++i;
      } else {
        tris.push_back({inner(i), outer(m), outer(m + 1)});
        ++m;
      }
    }
  }

  std::vector<BoundaryTag> tags;
  for (std::size_t k = 0; k < ring_size[rings]; ++k) {
    tags.push_back({ring_start[rings] + k, ring_start[rings] + (k + 1) % ring_size[rings], marker::disc});
  }
  return build_face_connectivity(std::move(nodes), std::move(tris), tags);
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "tmesh 1\n";
  out << mesh.num_nodes() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_faces().size() << '\n';
  out.precision(17);
  for (const auto& p : mesh.nodes()) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& f : mesh.boundary_faces()) out << f.a << ' ' << f.b << ' ' << f.marker << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line as a stream; throws with the line number at EOF.
  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw MalformedMesh(std::string("unexpected end of file, expected ") + what, line_no_ + 1);
  }

  std::size_t line() const { return line_no_; }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

template <typename... T>
void parse_fields(std::istringstream& ss, const LineReader& reader, const char* what, T&... fields) {
  if (!((ss >> fields) && ...)) throw MalformedMesh(std::string("cannot parse ") + what, reader.line());
  std::string rest;
  if (ss >> rest) throw MalformedMesh(std::string("trailing data after ") + what, reader.line());
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedMesh("cannot open " + path.string());
  LineReader reader(in);

  {
    auto ss = reader.next("header");
    std::string magic;
    int version = 0;
    parse_fields(ss, reader, "header", magic, version);
    if (magic != "tmesh" || version != 1) throw MalformedMesh("bad header, expected 'tmesh 1'", reader.line());
  }
  // Parse counts as signed so that "-1" is reported instead of wrapping.
  long long n_nodes = 0, n_tris = 0, n_bfaces = 0;
  {
    auto ss = reader.next("counts");
    parse_fields(ss, reader, "counts", n_nodes, n_tris, n_bfaces);
    if (n_nodes < 0 || n_tris < 0 || n_bfaces < 0) throw MalformedMesh("negative count", reader.line());
  }

  std::vector<Point2> nodes(static_cast<std::size_t>(n_nodes));
  for (auto& p : nodes) {
    auto ss = reader.next("node");
    parse_fields(ss, reader, "node", p.x, p.y);
  }
  std::vector<Triangle> tris(static_cast<std::size_t>(n_tris));
  for (auto& t : tris) {
    auto ss = reader.next("triangle");
    long long i = 0, j = 0, k = 0;
    parse_fields(ss, reader, "triangle", i, j, k);
    for (long long v : {i, j, k}) {
      if (v < 0 || v >= n_nodes) {
        throw MalformedMesh("triangle index " + std::to_string(v) + " out of range", reader.line());
      }
    }
    t = {static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)};
  }
  std::vector<BoundaryTag> tags(static_cast<std::size_t>(n_bfaces));
  std::vector<std::size_t> tag_lines(tags.size());
  for (std::size_t f = 0; f < tags.size(); ++f) {
    auto ss = reader.next("boundary face");
    long long a = 0, b = 0;
    int mk = 0;
    parse_fields(ss, reader, "boundary face", a, b, mk);
    if (a < 0 || a >= n_nodes || b < 0 || b >= n_nodes) {
      throw MalformedMesh("boundary face index out of range", reader.line());
    }
    tags[f] = {static_cast<std::size_t>(a), static_cast<std::size_t>(b), mk};
    tag_lines[f] = reader.line();
  }
  if (tris.empty()) throw MalformedMesh("mesh has no triangles", reader.line());

  TriMesh mesh = build_face_connectivity(std::move(nodes), std::move(tris), tags);
  if (mesh.boundary_faces().size() != tags.size()) {
    // locate a listed face that is not a boundary edge
    std::map<EdgeKey, bool> on_boundary;
    for (const auto& f : mesh.boundary_faces()) on_boundary[make_key(f.a, f.b)] = true;
    for (std::size_t f = 0; f < tags.size(); ++f) {
      if (!on_boundary.count(make_key(tags[f].a, tags[f].b))) {
        throw MalformedMesh("listed boundary face is not a boundary edge", tag_lines[f]);
      }
    }
    throw MalformedMesh("boundary face count " + std::to_string(tags.size()) + " does not match mesh (" +
                        std::to_string(mesh.boundary_faces().size()) + ")");
  }
  return mesh;
}

MeshStatistics mesh_statistics(const TriMesh& mesh) {
  MeshStatistics s;
  s.h_min = std::numeric_limits<double>::infinity();
  s.min_angle = 180.0;
  const auto& nodes = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double diameter = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Point2 p = nodes[tri[k]];
      const Point2 e1 = nodes[tri[(k + 1) % 3]] - p;
      const Point2 e2 = nodes[tri[(k + 2) % 3]] - p;
      diameter = std::max(diameter, norm(e1));
      const double angle = std::atan2(std::abs(cross(e1, e2)), dot(e1, e2)) * 180.0 / std::numbers::pi;
      s.min_angle = std::min(s.min_angle, angle);
    }
    s.h_max = std::max(s.h_max, diameter);
    s.h_min = std::min(s.h_min, diameter);
    s.area += mesh.signed_area(t);
  }
  return s;
}

}  // namespace cipimex
