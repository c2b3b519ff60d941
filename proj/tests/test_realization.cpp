#include <doctest.h>

#include <random>
#include <set>

#include <Eigen/Geometry>

#include "fixtures.hpp"
#include "flexlat/realization.hpp"

using namespace flexlat;

namespace {

Eigen::Matrix3d random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

}  // namespace

TEST_SUITE("realization") {
  TEST_CASE("edge_length_sq examples") {
    Realization r;
    r.positions = {Vec3(0, 0, 0), Vec3(0.5, 0, 0)};
    r.a = Vec3(2, 0, 0);
    r.b = Vec3(0, 1, 0);
    CHECK(edge_length_sq(r, Edge::canonical(0, 1, {1, 0})) == doctest::Approx(6.25));
    CHECK(edge_length_sq(r, Edge::canonical(1, 1, {1, 0})) == doctest::Approx(4.0));
    Realization s;
    s.positions = {Vec3(0, 0, 0), Vec3(0, 0, 0)};
    s.a = Vec3(1, 0, 0);
    s.b = Vec3(0, 1, 0);
    CHECK(edge_length_sq(s, Edge::canonical(0, 1, {1, 1})) == doctest::Approx(2.0));
  }

  TEST_CASE("gram examples") {
    Realization r;
    r.positions = {Vec3::Zero()};
    r.a = Vec3(1, 0, 0);
    r.b = Vec3(0, 1, 0);
    auto g = gram(r);
    CHECK(g.g11 == 1.0);
    CHECK(g.g12 == 0.0);
    CHECK(g.g22 == 1.0);
    r.a = Vec3(2, 0, 0);
    r.b = Vec3(1, 2, 0);
    g = gram(r);
    CHECK(g.g11 == 4.0);
    CHECK(g.g12 == 2.0);
    CHECK(g.g22 == 5.0);
    r.b = Vec3(4, 0, 0);
    CHECK_THROWS_AS(gram(r), std::invalid_argument);
  }

  TEST_CASE("apply_gauge hand example") {
    Realization r;
    r.positions = {Vec3(1, 1, 1)};
    r.a = Vec3(0, 2, 0);
    r.b = Vec3(0, 1, 2);
    const Realization g = apply_gauge(r);
    CHECK((g.a - Vec3(2, 0, 0)).norm() < 1e-15);
    CHECK((g.b - Vec3(1, 2, 0)).norm() < 1e-15);
    CHECK(g.positions[0].norm() == 0.0);
  }

  TEST_CASE("apply_gauge kills rigid motions and is idempotent") {
    std::mt19937 rng(1);
    const auto c = flexlat::testing::unit_plane(IntMatrix2::diag(2, 2)).complex;
    for (int trial = 0; trial < 25; ++trial) {
      const Realization r = flexlat::testing::random_realization(c.n_orbits(), rng);
      const Realization g = apply_gauge(r);
      const Realization moved = rigid_motion(r, random_rotation(rng), Vec3(0.3, -2.0, 1.0));
      const Realization g2 = apply_gauge(moved);
      for (int o = 0; o < c.n_orbits(); ++o) CHECK((g.positions[o] - g2.positions[o]).norm() < 1e-12);
      CHECK((g.a - g2.a).norm() < 1e-12);
      CHECK((g.b - g2.b).norm() < 1e-12);
      CHECK(g.a.x() > 0.0);
      CHECK(g.b.y() > 0.0);
      CHECK(g.a.y() == 0.0);
      CHECK(g.a.z() == 0.0);
      CHECK(g.b.z() == 0.0);

      const auto G = gram(r), H = gram(g);
      CHECK(std::abs(G.g11 - H.g11) < 1e-12);
      CHECK(std::abs(G.g12 - H.g12) < 1e-12);
      CHECK(std::abs(G.g22 - H.g22) < 1e-12);
      for (const auto& e : c.edges()) CHECK(std::abs(edge_length_sq(r, e) - edge_length_sq(g, e)) < 1e-12);

      const Realization gg = apply_gauge(g);
      for (int o = 0; o < c.n_orbits(); ++o) CHECK((gg.positions[o] - g.positions[o]).norm() < 1e-14);
    }
  }

  TEST_CASE("residuals") {
    const auto model = flexlat::testing::unit_plane(IntMatrix2::diag(1, 2));
    const auto& c = model.complex;
    const EdgeLengths target = all_edge_lengths(c, model.flat);
    CHECK(residuals(c, model.flat, target).cwiseAbs().maxCoeff() == 0.0);

    // Orbit 1 moved by delta along the unit edge direction (0,1,0) of [0,1,(0,0)].
    Realization moved = model.flat;
    const double delta = 1e-4;
    moved.positions[1] += Vec3(0, delta, 0);
    const auto cons = c.constraints();
    const auto res = residuals(c, moved, target);
    const auto it = std::find(cons.begin(), cons.end(), Edge::canonical(0, 1, {0, 0}));
    REQUIRE(it != cons.end());
    CHECK(res[it - cons.begin()] == doctest::Approx(2 * delta + delta * delta).epsilon(1e-9));

    Realization scaled = model.flat;
    const double s = 1.7;
    for (auto& p : scaled.positions) p *= s;
    scaled.a *= s;
    scaled.b *= s;
    const auto sres = residuals(c, scaled, target);
    for (std::size_t i = 0; i < cons.size(); ++i)
      CHECK(sres[static_cast<Eigen::Index>(i)] == doctest::Approx((s * s - 1) * target.at(cons[i])));

    EdgeLengths missing = target;
    missing.erase(missing.begin());
    CHECK_THROWS_AS(residuals(c, model.flat, missing), std::out_of_range);
  }

  TEST_CASE("property: edge lengths are invariant under motions and re-canonicalization") {
    std::mt19937 rng(2);
    const auto c = flexlat::testing::unit_plane(IntMatrix2::diag(2, 2)).complex;
    for (int trial = 0; trial < 20; ++trial) {
      const Realization r = flexlat::testing::random_realization(c.n_orbits(), rng);
      const Realization m = rigid_motion(r, random_rotation(rng), Vec3(1, 2, 3));
      for (const auto& e : c.edges()) {
        CHECK(std::abs(edge_length_sq(r, e) - edge_length_sq(m, e)) < 1e-12);
        const Edge rev{e.v, e.u, -e.shift};
        CHECK(std::abs(edge_length_sq(r, e) - edge_length_sq(r, rev)) < 1e-12);
      }
    }
  }

  TEST_CASE("property: refined Gram matrix is C^T G C") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
      const Realization r = flexlat::testing::random_realization(1, rng);
      const IntMatrix2 C = flexlat::testing::random_sublattice(rng);
      const GramMatrix G = gram(r);
      const GramMatrix H = gram(refine_realization(r, C));
      Eigen::Matrix2d Gm, Cm;
      Gm << G.g11, G.g12, G.g12, G.g22;
      Cm << static_cast<double>(C(0, 0)), static_cast<double>(C(0, 1)), static_cast<double>(C(1, 0)),
          static_cast<double>(C(1, 1));
      const Eigen::Matrix2d expect = Cm.transpose() * Gm * Cm;
      CHECK(std::abs(H.g11 - expect(0, 0)) < 1e-12 * (1 + std::abs(expect(0, 0))));
      CHECK(std::abs(H.g12 - expect(0, 1)) < 1e-12 * (1 + std::abs(expect(0, 1))));
      CHECK(std::abs(H.g22 - expect(1, 1)) < 1e-12 * (1 + std::abs(expect(1, 1))));
    }
  }

  TEST_CASE("refined realization reproduces the coarse edge lengths") {
    std::mt19937 rng(8);
    const auto base = flexlat::testing::unit_plane().complex;
    for (int trial = 0; trial < 10; ++trial) {
      const Realization r = flexlat::testing::random_realization(1, rng);
      const IntMatrix2 C = flexlat::testing::random_sublattice(rng);
      const auto fine = change_of_basis(base, C);
      const Realization rf = refine_realization(r, C);
      const auto coarse = all_edge_lengths(base, r);
      std::set<double> want, got;
      for (const auto& [e, l] : coarse) want.insert(std::round(l * 1e9) / 1e9);
      for (const auto& e : fine.edges()) got.insert(std::round(edge_length_sq(rf, e) * 1e9) / 1e9);
      CHECK(want == got);
    }
  }
}
