#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "cipimex/errors.hpp"
#include "cipimex/mesh.hpp"
#include "doctest.h"

using namespace cipimex;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cipimex_test_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream(p) << content;
}

// Checks every structural invariant a TriMesh must satisfy.
void check_invariants(const TriMesh& m) {
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);
  for (const auto& f : m.interior_faces()) {
    CHECK(std::abs(norm(f.normal) - 1.0) < 1e-12);
    for (std::size_t t : {f.left, f.right}) {
      const auto& tri = m.triangles()[t];
      const auto has = [&](std::size_t v) { return tri[0] == v || tri[1] == v || tri[2] == v; };
      CHECK(has(f.a));
      CHECK(has(f.b));
    }
    // normal points away from the left triangle
    const Point2 mid = 0.5 * (m.nodes()[f.a] + m.nodes()[f.b]);
    CHECK(dot(mid - m.centroid(f.left), f.normal) > 0.0);
    CHECK(dot(mid - m.centroid(f.right), f.normal) < 0.0);
  }
  Point2 closure{0.0, 0.0};
  for (const auto& f : m.boundary_faces()) {
    CHECK(std::abs(norm(f.normal) - 1.0) < 1e-12);
    closure = closure + f.length * f.normal;
    const Point2 mid = 0.5 * (m.nodes()[f.a] + m.nodes()[f.b]);
    CHECK(dot(mid - m.centroid(f.tri), f.normal) > 0.0);
  }
  CHECK(std::abs(closure.x) < 1e-12);
  CHECK(std::abs(closure.y) < 1e-12);
  // 3T = 2 I + B
  CHECK(3 * m.num_triangles() == 2 * m.interior_faces().size() + m.boundary_faces().size());
}

}  // namespace

TEST_CASE("square mesh counts and markers") {
  const TriMesh m1 = generate_square_mesh(1);
  CHECK(m1.num_nodes() == 4);
  CHECK(m1.num_triangles() == 2);
  CHECK(m1.interior_faces().size() == 1);
  CHECK(m1.boundary_faces().size() == 4);

  const TriMesh m2 = generate_square_mesh(2);
  CHECK(m2.num_nodes() == 9);
  CHECK(m2.num_triangles() == 8);
  CHECK(m2.interior_faces().size() == 8);
  CHECK(mesh_statistics(m2).area == doctest::Approx(1.0).epsilon(1e-14));
  check_invariants(m2);

  int counts[5] = {0, 0, 0, 0, 0};
  for (const auto& f : m2.boundary_faces()) {
    REQUIRE(f.marker >= 1);
    REQUIRE(f.marker <= 4);
    ++counts[f.marker];
    const Point2 mid = 0.5 * (m2.nodes()[f.a] + m2.nodes()[f.b]);
    switch (f.marker) {
      case marker::left: CHECK(mid.x == 0.0); break;
      case marker::right: CHECK(mid.x == 1.0); break;
      case marker::bottom: CHECK(mid.y == 0.0); break;
      case marker::top: CHECK(mid.y == 1.0); break;
    }
  }
  for (int k = 1; k <= 4; ++k) CHECK(counts[k] == 2);

  CHECK_THROWS_AS(generate_square_mesh(0), InvalidArgument);
}

TEST_CASE("square mesh statistics") {
  const auto s10 = mesh_statistics(generate_square_mesh(10));
  CHECK(s10.h_max == doctest::Approx(std::sqrt(2.0) / 10).epsilon(1e-14));
  CHECK(s10.min_angle == doctest::Approx(45.0).epsilon(1e-12));
  const auto s40 = mesh_statistics(generate_square_mesh(40));
  CHECK(s40.h_max == doctest::Approx(std::sqrt(2.0) / 40).epsilon(1e-14));
  // power-of-two spacings are exact in binary, so halving is exact
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    CHECK(mesh_statistics(generate_square_mesh(2 * n)).h_max == mesh_statistics(generate_square_mesh(n)).h_max / 2);
  }
  for (std::size_t n : {3u, 5u, 10u}) {
    CHECK(mesh_statistics(generate_square_mesh(2 * n)).h_max ==
          doctest::Approx(mesh_statistics(generate_square_mesh(n)).h_max / 2).epsilon(1e-14));
    const auto s = mesh_statistics(generate_square_mesh(n));
    CHECK(s.h_max / s.h_min <= 4.0);
    CHECK(std::abs(s.area - 1.0) < 1e-10);
  }
}

TEST_CASE("disc mesh") {
  const TriMesh m = generate_disc_mesh(40);
  check_invariants(m);
  CHECK(m.boundary_faces().size() == 40);
  for (const auto& f : m.boundary_faces()) {
    CHECK(f.marker == marker::disc);
    CHECK(f.length == doctest::Approx(2.0 * std::sin(std::numbers::pi / 40)).epsilon(1e-12));
    CHECK(std::abs(norm(m.nodes()[f.a]) - 1.0) < 1e-12);
  }
  const auto s = mesh_statistics(m);
  CHECK(std::abs(s.area - std::numbers::pi) / std::numbers::pi < 0.01);
  CHECK(std::abs(mesh_statistics(generate_disc_mesh(80)).area - std::numbers::pi) / std::numbers::pi < 0.0025);

  for (std::size_t nele : {8u, 20u, 40u, 80u, 160u}) {
    const TriMesh d = generate_disc_mesh(nele);
    check_invariants(d);
    CHECK(d.boundary_faces().size() == nele);
    const auto st = mesh_statistics(d);
    CHECK(st.min_angle >= 20.0);
    CHECK(st.h_max / st.h_min <= 4.0);
    // inscribed polygon: relative deficit ~ (2 pi / nele)^2 / 6
    CHECK(std::abs(st.area - std::numbers::pi) / std::numbers::pi < 7.0 / double(nele * nele));
  }
  CHECK_THROWS_AS(generate_disc_mesh(7), InvalidArgument);
}

TEST_CASE("face connectivity from raw triangles") {
  SUBCASE("two triangles sharing an edge") {
    const TriMesh m = build_face_connectivity({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
    CHECK(m.interior_faces().size() == 1);
    CHECK(m.boundary_faces().size() == 4);
    check_invariants(m);
  }
  SUBCASE("single triangle, clockwise input is reoriented") {
    const TriMesh m = build_face_connectivity({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}});
    CHECK(m.interior_faces().empty());
    CHECK(m.boundary_faces().size() == 3);
    CHECK(m.signed_area(0) == doctest::Approx(0.5));
  }
  SUBCASE("edge shared by three triangles") {
    CHECK_THROWS_AS(build_face_connectivity({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}},
                                            {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}),
                    MalformedMesh);
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(build_face_connectivity({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5}}), MalformedMesh);
  }
}

TEST_CASE("mesh file round trip") {
  const auto path = temp_file("roundtrip.tmesh");
  for (const TriMesh& m : {generate_square_mesh(2), generate_disc_mesh(24)}) {
    save_mesh(m, path);
    const TriMesh l = load_mesh(path);
    REQUIRE(l.num_nodes() == m.num_nodes());
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
      CHECK(std::abs(l.nodes()[i].x - m.nodes()[i].x) <= 1e-15);
      CHECK(std::abs(l.nodes()[i].y - m.nodes()[i].y) <= 1e-15);
    }
    CHECK(l.triangles() == m.triangles());
    REQUIRE(l.boundary_faces().size() == m.boundary_faces().size());
    for (std::size_t f = 0; f < m.boundary_faces().size(); ++f) {
      CHECK(l.boundary_faces()[f].marker == m.boundary_faces()[f].marker);
    }
    CHECK(l.interior_faces().size() == m.interior_faces().size());
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed mesh files") {
  const auto path = temp_file("bad.tmesh");
  SUBCASE("empty file") {
    write_file(path, "");
    CHECK_THROWS_AS(load_mesh(path), MalformedMesh);
  }
  SUBCASE("triangle index out of range reports its line") {
    write_file(path, "tmesh 1\n4 1 0\n0 0\n1 0\n1 1\n0 1\n0 1 99\n");
    try {
      load_mesh(path);
      FAIL("expected MalformedMesh");
    } catch (const MalformedMesh& e) {
      CHECK(e.line() == 7);
    }
  }
  SUBCASE("bad header") {
    write_file(path, "mesh 2\n");
    CHECK_THROWS_AS(load_mesh(path), MalformedMesh);
  }
  SUBCASE("unparsable coordinate") {
    write_file(path, "tmesh 1\n3 1 0\n0 0\n1 abc\n0 1\n0 1 2\n");
    try {
      load_mesh(path);
      FAIL("expected MalformedMesh");
    } catch (const MalformedMesh& e) {
      CHECK(e.line() == 4);
    }
  }
  SUBCASE("truncated") {
    write_file(path, "tmesh 1\n3 1 0\n0 0\n1 0\n");
    CHECK_THROWS_AS(load_mesh(path), MalformedMesh);
  }
  SUBCASE("listed boundary face that is interior") {
    write_file(path, "tmesh 1\n4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 2 5\n");
    CHECK_THROWS_AS(load_mesh(path), MalformedMesh);
  }
  std::filesystem::remove(path);
}
