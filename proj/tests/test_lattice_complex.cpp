#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "flexlat/complex.hpp"

using namespace flexlat;
using flexlat::testing::unit_plane;

TEST_SUITE("lattice_complex") {
  TEST_CASE("is_primitive") {
    CHECK(is_primitive({2, 3}));
    CHECK_FALSE(is_primitive({2, 4}));
    CHECK_FALSE(is_primitive({0, 0}));
    CHECK(is_primitive({0, -1}));
    CHECK(is_primitive({-5, 3}));
    CHECK_FALSE(is_primitive({0, 2}));
  }

  TEST_CASE("edge canonical form") {
    const Edge e = Edge::canonical(1, 0, {1, -1});
    CHECK(e.u == 0);
    CHECK(e.v == 1);
    CHECK(e.shift == LatticeVector{-1, 1});
    CHECK(Edge::canonical(0, 0, {-1, 0}) == Edge::canonical(0, 0, {1, 0}));
    CHECK(Edge::canonical(0, 0, {0, -1}).shift == LatticeVector{0, 1});
  }

  TEST_CASE("triangle canonical form ignores rotation and translation") {
    const Lift a{0, {3, 1}}, b{1, {4, 1}}, c{0, {3, 2}};
    const Triangle t = Triangle::canonical(a, b, c);
    CHECK(t == Triangle::canonical(b, c, a));
    CHECK(t == Triangle::canonical(c.translated({5, -7}), a.translated({5, -7}), b.translated({5, -7})));
    CHECK(t.corners[0].shift.is_zero());
    CHECK(t != t.reversed());
  }

  TEST_CASE("sublattice reduction") {
    const Sublattice s(IntMatrix2::from_rows(2, 1, 0, 3));
    CHECK(s.index() == 6);
    CHECK(s.coset_representatives().size() == 6);
    for (std::int64_t m = -5; m <= 5; ++m)
      for (std::int64_t k = -5; k <= 5; ++k) {
        const auto r = s.reduce({m, k});
        CHECK(s.coset_representatives()[r.coset] + s.basis().apply(r.coords) == LatticeVector{m, k});
      }
    CHECK_THROWS_AS(Sublattice(IntMatrix2::from_rows(1, 2, 2, 4)), std::invalid_argument);
  }

  TEST_CASE("triangulated plane validates") {
    const auto c = unit_plane().complex;
    CHECK(validate(c).ok());
    CHECK(c.n_orbits() == 1);
    CHECK(c.edges().size() == 3);
    CHECK(c.triangles().size() == 2);
    CHECK(euler_characteristic(c) == 0);
    CHECK(c.degree(0) == 6);
  }

  TEST_CASE("deleting a triangle breaks closedness") {
    const auto c = unit_plane().complex;
    const auto broken = PeriodicComplex::make(1, c.edges(), {c.triangles()[0]});
    const auto report = validate(broken);
    CHECK(report.has(ViolationKind::kEdgeTriangleCount));
  }

  TEST_CASE("non-primitive self-edge is reported") {
    const auto c = unit_plane().complex;
    auto edges = c.edges();
    edges.push_back(Edge::canonical(0, 0, {2, 0}));
    CHECK(validate(PeriodicComplex::make(1, edges, c.triangles())).has(ViolationKind::kNonPrimitiveSelfEdge));
  }

  TEST_CASE("inconsistent orientation is reported") {
    const auto c = unit_plane().complex;
    const auto flipped = PeriodicComplex::make(1, c.edges(), {c.triangles()[0], c.triangles()[1].reversed()});
    CHECK(validate(flipped).has(ViolationKind::kInconsistentOrientation));
  }

  TEST_CASE("quotient whose cover is not the plane is rejected") {
    // The plane refined by diag(1,2) but with its shifts read modulo the coarser
    // lattice: same combinatorics, loops generate an index-2 subgroup.
    const Lift o{0, {0, 0}};
    auto at = [](std::int64_t m, std::int64_t k) { return Lift{0, {m, k}}; };
    const auto c = PeriodicComplex::make(
        1, {Edge::canonical(0, 0, {2, 0}), Edge::canonical(0, 0, {0, 1}), Edge::canonical(0, 0, {2, -1})},
        {Triangle::canonical(o, at(2, 0), at(0, 1)), Triangle::canonical(at(2, 0), at(2, 1), at(0, 1))});
    const auto report = validate(c);
    CHECK(report.has(ViolationKind::kNonPrimitiveSelfEdge));
    CHECK(report.has(ViolationKind::kCoverNotPlane));
  }

  TEST_CASE("euler characteristic examples") {
    CHECK(euler_characteristic(unit_plane().complex) == 0);
    const auto refined = unit_plane(IntMatrix2::diag(2, 2)).complex;
    CHECK(refined.n_orbits() == 4);
    CHECK(refined.edges().size() == 12);
    CHECK(refined.triangles().size() == 8);
    CHECK(euler_characteristic(refined) == 0);
    const auto base = unit_plane().complex;
    const auto star = star_subdivide(base, base.triangles()[0]);
    CHECK(star.n_orbits() == 2);
    CHECK(star.edges().size() == 6);
    CHECK(star.triangles().size() == 4);
    CHECK(euler_characteristic(star) == 0);
  }

  TEST_CASE("change_of_basis counts") {
    const auto base = unit_plane().complex;
    CHECK(isomorphic(change_of_basis(base, IntMatrix2::identity()), base));
    const auto half = change_of_basis(base, IntMatrix2::diag(1, 2));
    CHECK(half.n_orbits() == 2);
    CHECK(half.edges().size() == 6);
    CHECK(half.triangles().size() == 4);
    CHECK(validate(half).ok());
    CHECK_THROWS_AS(change_of_basis(base, IntMatrix2::from_rows(1, 1, 1, 1)), std::invalid_argument);
  }

  TEST_CASE("change_of_basis with a unimodular matrix is an isomorphism") {
    const auto base = unit_plane(IntMatrix2::diag(1, 2)).complex;
    const auto sheared = change_of_basis(base, IntMatrix2::from_rows(1, 1, 0, 1));
    CHECK(sheared.n_orbits() == 2);
    CHECK(validate(sheared).ok());
  }

  TEST_CASE("special orbits") {
    CHECK(special_orbits(unit_plane().complex) == std::vector<int>{0});
    CHECK(special_orbits(unit_plane(IntMatrix2::diag(1, 2)).complex) == std::vector<int>{0, 1});
    CHECK(special_orbits(unit_plane(IntMatrix2::diag(2, 2)).complex).empty());
  }

  TEST_CASE("vertex link is a cycle over the neighbours") {
    const auto c = unit_plane(IntMatrix2::diag(2, 2)).complex;
    for (int o = 0; o < c.n_orbits(); ++o) {
      auto link = vertex_link(c, o);
      CHECK(link.size() == 6);
      auto nb = c.neighbours(o);
      std::sort(link.begin(), link.end());
      std::sort(nb.begin(), nb.end());
      CHECK(link == nb);
    }
  }

  TEST_CASE("lift patch") {
    const auto c = unit_plane().complex;
    const auto patch = lift_patch(c, CellRange::square(3));
    CHECK(patch.vertices.size() == 9);
    CHECK(patch.euler_characteristic() == 1);
    const auto empty = lift_patch(c, CellRange{0, 0, 0, 0});
    CHECK(empty.vertices.empty());
    const auto single = lift_patch(c, CellRange::square(1));
    CHECK(single.vertices.size() == 1);
    CHECK(single.edges.empty());
    CHECK(single.triangles.empty());
  }

  TEST_CASE("property: refinements are valid tori") {
    std::mt19937 rng(11);
    const auto base = unit_plane().complex;
    for (int trial = 0; trial < 40; ++trial) {
      const IntMatrix2 C = flexlat::testing::random_sublattice(rng);
      const auto c = change_of_basis(base, C);
      CHECK(c.n_orbits() == std::abs(C.det()));
      CHECK(euler_characteristic(c) == 0);
      CHECK(validate(c).ok());
    }
  }

  TEST_CASE("property: change_of_basis composes") {
    std::mt19937 rng(5);
    const auto base = unit_plane().complex;
    for (int trial = 0; trial < 20; ++trial) {
      const IntMatrix2 C1 = flexlat::testing::random_sublattice(rng);
      const IntMatrix2 C2 = flexlat::testing::random_sublattice(rng);
      if (std::abs((C1 * C2).det()) > 8) continue;
      CHECK(isomorphic(change_of_basis(change_of_basis(base, C1), C2), change_of_basis(base, C1 * C2)));
    }
  }

  TEST_CASE("property: self-edges upstairs project to self-edges downstairs") {
    std::mt19937 rng(3);
    const auto base = unit_plane(IntMatrix2::diag(1, 2)).complex;
    for (int trial = 0; trial < 20; ++trial) {
      const IntMatrix2 C = flexlat::testing::random_sublattice(rng);
      const int index = static_cast<int>(std::abs(C.det()));
      const auto c = change_of_basis(base, C);
      const auto below = special_orbits(base);
      for (int o : special_orbits(c)) CHECK(std::count(below.begin(), below.end(), o / index) == 1);
      for (const auto& e : c.edges())
        if (e.is_self_edge()) CHECK(is_primitive(e.shift));
    }
  }

  TEST_CASE("isomorphism detects differences") {
    const auto a = unit_plane(IntMatrix2::diag(1, 2)).complex;
    CHECK(isomorphic(a, a));
    CHECK_FALSE(isomorphic(a, unit_plane(IntMatrix2::diag(2, 2)).complex));
    const auto star = star_subdivide(a, a.triangles()[0]);
    CHECK_FALSE(isomorphic(a, star));
  }
}
