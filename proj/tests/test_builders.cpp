#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "flexlat/builders.hpp"
#include "flexlat/reduction.hpp"

using namespace flexlat;
using flexlat::testing::reference_miura;
using flexlat::testing::unit_plane;

namespace {

double max_residual(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target) {
  return constraint_residuals(c, q, target).cwiseAbs().maxCoeff();
}

double hyperbola(const MiuraParams& p, const GramMatrix& g) {
  const double s = std::sin(p.alpha), c = std::cos(p.alpha);
  return g.g11 * g.g22 * s * s - g.g11 * p.b0_len * p.b0_len + p.a0_len * p.a0_len * p.b0_len * p.b0_len * c * c;
}

}  // namespace

TEST_SUITE("builders") {
  TEST_CASE("triangulated plane variants") {
    for (const auto& C : {IntMatrix2::identity(), IntMatrix2::diag(1, 2), IntMatrix2::diag(2, 2)}) {
      const auto m = unit_plane(C);
      CHECK(validate(m.complex).ok());
      CHECK(m.complex.n_orbits() == std::abs(C.det()));
      CHECK(m.flat.positions.size() == static_cast<std::size_t>(m.complex.n_orbits()));
      for (const auto& p : m.flat.positions) CHECK(p.z() == 0.0);
    }
    CHECK_THROWS_AS(triangulated_plane(Vec3(1, 0, 0), Vec3(2, 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(triangulated_plane(Vec3(1, 0, 0), Vec3(0, 1, 0), IntMatrix2::from_rows(1, 2, 1, 2)),
                    std::invalid_argument);
  }

  TEST_CASE("accordion seed of the diag(1,2) plane") {
    const auto m = unit_plane(IntMatrix2::diag(1, 2));
    const Configuration flat = folded_plane_seed(m, 0.0, FoldFamily::kParallelA);
    for (int o = 0; o < m.complex.n_orbits(); ++o)
      if (o != flat.pinned) CHECK(std::abs(flat.coords[flat.slot(o) + 2]) < 1e-15);

    const double phi = std::numbers::pi / 6;
    const Configuration q = folded_plane_seed(m, phi, FoldFamily::kParallelA);
    const auto g = q.gram();
    CHECK(g.g11 == doctest::Approx(1.0));
    CHECK(std::abs(g.g12) < 1e-15);
    CHECK(g.g22 == doctest::Approx(3.0));
    CHECK(max_residual(m.complex, q, all_edge_lengths(m.complex, m.flat)) <= 1e-12);

    const Configuration folded = folded_plane_seed(m, std::numbers::pi / 2 - 1e-9, FoldFamily::kParallelA);
    CHECK(folded.gram().g22 < 1e-15);

    CHECK_THROWS_AS(folded_plane_seed(m, 0.3, FoldFamily::kParallelB), std::invalid_argument);
  }

  TEST_CASE("property: accordion Gram values match the closed form") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> angle(-1.5, 1.5), shear(-0.8, 0.8);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec3 a(1.3, 0, 0), b(shear(rng), 0.9, 0.2);
      const auto m = triangulated_plane(a, b, IntMatrix2::diag(1, 2));
      const double phi = angle(rng);
      const Configuration q = folded_plane_seed(m, phi, FoldFamily::kParallelA);
      const Vec3 along = a.normalized();
      const double par = b.dot(along);
      const double perp2 = b.squaredNorm() - par * par;
      const auto g = q.gram();
      CHECK(std::abs(g.g11 - a.squaredNorm()) < 1e-12);
      CHECK(std::abs(g.g12 - 2 * par * a.norm()) < 1e-12);
      CHECK(std::abs(g.g22 - (4 * par * par + 4 * perp2 * std::cos(phi) * std::cos(phi))) < 1e-12);
      CHECK(max_residual(m.complex, q, all_edge_lengths(m.complex, m.flat)) <= 1e-12);
    }
  }

  TEST_CASE("all three fold families on the diag(2,2) plane") {
    const auto m = unit_plane(IntMatrix2::diag(2, 2));
    const auto target = all_edge_lengths(m.complex, m.flat);
    for (auto fam : m.fold_families) {
      const Configuration q = folded_plane_seed(m, 0.5, fam);
      CHECK(max_residual(m.complex, q, target) <= 1e-12);
      CHECK(infinitesimal_flex_space(constraint_jacobian(m.complex, q)).dimension == 1);
    }
  }

  TEST_CASE("grid squares") {
    const auto g = grid_squares(1.0, IntMatrix2::diag(2, 2));
    CHECK(validate(g.complex).ok());
    CHECK(g.complex.aux_constraints().size() * 2 == g.complex.triangles().size());
    const auto target = all_edge_lengths(g.complex, g.flat);
    const Configuration q = folded_plane_seed(g, 0.5, FoldFamily::kParallelB);
    CHECK(max_residual(g.complex, q, target) <= 1e-12);
    CHECK(gram_tangent_rank(g.complex, q) == 1);
    CHECK_THROWS_AS(folded_plane_seed(g, 0.5, FoldFamily::kParallelAMinusB), std::invalid_argument);

    // Folded along x-lines: g11 shrinks, g22 stays.
    const FlexSpace f = infinitesimal_flex_space(constraint_jacobian(g.complex, q));
    const Eigen::VectorXd dg = gram_differential(q) * f.basis.col(0);
    CHECK(std::abs(dg[2]) < 1e-10);
    CHECK(std::abs(dg[1]) < 1e-10);
    CHECK(std::abs(dg[0]) > 1e-3);
    CHECK_THROWS_AS(grid_squares(0.0), std::invalid_argument);
  }

  TEST_CASE("Miura-ori satisfies the Gram system") {
    const MiuraParams p = reference_miura();
    const auto m = miura_ori(p);
    CHECK(validate(m.complex).ok());
    CHECK(m.complex.n_orbits() == 4);
    CHECK(m.complex.aux_constraints().size() == 4);
    CHECK(std::abs(p.a_len() - std::sqrt(4 - 4 * 0.09)) < 1e-15);
    const auto g = gram(m.realization);
    CHECK(g.g12 == 0.0);
    CHECK(std::abs(hyperbola(p, g)) <= 1e-10);

    // Faces stay congruent to the flat parallelogram xi0 = (|a0|/2, 0, 0),
    // eta0 = (|b0|/2 cot alpha, |b0|/2, 0).
    const Realization& r = m.realization;
    const Vec3 xi = r.positions[1] - r.positions[0];
    const Vec3 eta = r.positions[2] - r.positions[0];
    CHECK(xi.norm() == doctest::Approx(p.a0_len / 2));
    CHECK(eta.norm() == doctest::Approx(p.b0_len / (2 * std::sin(p.alpha))));
    CHECK(xi.dot(eta) == doctest::Approx(p.a0_len * p.b0_len / (4 * std::tan(p.alpha))));
  }

  TEST_CASE("property: random Miura parameters") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> alpha(0.3, 1.3), len(1.0, 3.0), frac(0.05, 0.45);
    int built = 0;
    for (int trial = 0; built < 100 && trial < 1000; ++trial) {
      MiuraParams p{alpha(rng), len(rng), len(rng), 0.0};
      p.z = frac(rng) * p.a0_len;
      try {
        p.check();
      } catch (const std::invalid_argument&) {
        continue;
      }
      ++built;
      const auto m = miura_ori(p);
      const auto g = gram(m.realization);
      const double scale = std::max(std::pow(p.a0_len, 4), std::pow(p.b0_len, 4));
      CHECK(std::abs(g.g12) <= 1e-12);
      CHECK(std::abs(hyperbola(p, g)) <= 1e-10 * scale);
    }
    CHECK(built == 100);
  }

  TEST_CASE("Miura flat limit") {
    MiuraParams p = reference_miura();
    p.z = 1e-7;
    const auto g = gram(miura_ori(p).realization);
    CHECK(g.g11 == doctest::Approx(p.a0_len * p.a0_len).epsilon(1e-9));
    CHECK(std::abs(hyperbola(p, g)) < 1e-8);
  }

  TEST_CASE("Miura parameter checks") {
    MiuraParams p = reference_miura();
    p.z = 1.0;  // 2|z| = |a0|
    CHECK_THROWS_AS(miura_ori(p), std::invalid_argument);
    p = reference_miura();
    p.alpha = 1.6;
    CHECK_THROWS_AS(miura_ori(p), std::invalid_argument);
    p = reference_miura();
    p.z = 0.0;
    CHECK_THROWS_AS(miura_ori(p), std::invalid_argument);
  }

  TEST_CASE("star subdivision") {
    const auto c = unit_plane().complex;
    const Triangle t = c.triangles()[0];
    const auto s = star_subdivide(c, t);
    CHECK(validate(s).ok());
    CHECK(s.n_orbits() == 2);
    CHECK(s.edges().size() == 6);
    CHECK(s.triangles().size() == 4);
    CHECK_FALSE(is_special(s, 1));
    const auto w = find_empty_triangle(s);
    REQUIRE(w.has_value());
    CHECK((*w == t || *w == t.reversed()));
    CHECK_THROWS_AS(star_subdivide(c, t.reversed()), std::invalid_argument);

    const auto m = unit_plane();
    const Realization r = star_subdivide_realization(m.flat, t);
    CHECK(r.positions.size() == 2);
    CHECK(r.positions[1].z() == 0.0);
  }
}
