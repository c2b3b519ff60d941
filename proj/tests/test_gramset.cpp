#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "flexlat/gramset.hpp"

using namespace flexlat;
using flexlat::testing::reference_miura;

namespace {

GramCloud miura_cloud(int steps) {
  const auto m = miura_ori(reference_miura());
  const auto target = all_edge_lengths(m.complex, m.realization);
  const Configuration q = Configuration::from_realization(m.realization);
  const FlexSpace f = infinitesimal_flex_space(constraint_jacobian(m.complex, q));
  const std::vector<FlexPath> paths = {trace_flex(m.complex, q, f.basis.col(0), steps, target),
                                       trace_flex(m.complex, q, -f.basis.col(0), steps, target)};
  return sample_gram(paths);
}

GramCloud synthetic(const std::vector<Eigen::Vector3d>& pts, int path = 0) {
  GramCloud cloud;
  for (std::size_t i = 0; i < pts.size(); ++i)
    cloud.add({{pts[i][0], pts[i][1], pts[i][2]}, path, static_cast<double>(i)});
  return cloud;
}

}  // namespace

TEST_SUITE("gramset") {
  TEST_CASE("monomial order") {
    const auto m = monomials(2);
    REQUIRE(m.size() == 10);
    const std::vector<std::array<int, 3>> want = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
                                                  {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
    CHECK(m == want);
    CHECK(monomials(0).size() == 1);
    CHECK(monomials(3).size() == 20);
    CHECK(monomials(4).size() == 35);
  }

  TEST_CASE("cloud deduplication") {
    GramCloud c;
    c.add({{1, 0, 1}, 0, 0.0});
    c.add({{1 + 1e-14, 0, 1}, 1, 0.5});
    c.add({{1 + 1e-6, 0, 1}, 1, 1.0});
    CHECK(c.size() == 2);
  }

  TEST_CASE("Miura relations") {
    const GramCloud cloud = miura_cloud(50);
    CHECK(cloud.size() == 101);
    const auto rels = fit_relations(cloud, 2);
    REQUIRE(rels.size() == 2);
    int linear = 0;
    for (const auto& r : rels) {
      CHECK(relation_residual(r, cloud) <= 1e-6);
      if (r.effective_degree() == 1) {
        ++linear;
        // g12 = 0.
        CHECK(std::abs(std::abs(r.coeffs[2]) - 1.0) < 1e-6);
      }
    }
    CHECK(linear == 1);

    // Independent points on the same Gram curve: other fold heights.
    for (double z : {0.05, 0.15, 0.25}) {
      MiuraParams p = reference_miura();
      p.z = z;
      const GramMatrix g = gram(miura_ori(p).realization);
      for (const auto& r : rels) CHECK(std::abs(r(Eigen::Vector3d(g.g11, g.g12, g.g22))) < 1e-5);
    }
  }

  TEST_CASE("too few points") {
    GramCloud one;
    one.add({{1, 0, 1}, 0, 0.0});
    CHECK_THROWS_AS(fit_relations(one, 2), std::invalid_argument);
    CHECK_THROWS_AS(fit_relations(one, -1), std::invalid_argument);
  }

  TEST_CASE("points on a line satisfy two linear relations") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 40; ++i) {
      const double t = 0.1 * i;
      pts.push_back({1 + t, 0.5 - 2 * t, 3 + 0.25 * t});
    }
    const auto rels = fit_relations(synthetic(pts), 2);
    REQUIRE(rels.size() >= 2);
    int linear = 0;
    for (const auto& r : rels)
      if (r.effective_degree() == 1) ++linear;
    CHECK(linear == 2);
    // A point off the line violates one of them.
    double worst = 0;
    for (const auto& r : rels) worst = std::max(worst, std::abs(r(Eigen::Vector3d(1, 0, 0))));
    CHECK(worst > 1e-3);
  }

  TEST_CASE("relation residual") {
    PolyRelation one{0, Eigen::VectorXd::Ones(1)};
    CHECK(relation_residual(one, synthetic({{1, 0, 1}, {2, 0, 2}})) == doctest::Approx(1.0));

    PolyRelation y{1, Eigen::VectorXd::Zero(4)};
    y.coeffs[2] = 1.0;
    CHECK(relation_residual(y, synthetic({{1, 0, 1}})) == 0.0);
    CHECK(relation_residual(y, synthetic({{0.5, 1e-3, 0.5}})) == doctest::Approx(1e-3));
  }

  TEST_CASE("property: relations are invariant under rescaling the cloud") {
    const GramCloud cloud = miura_cloud(30);
    for (double s : {1e-2, 10.0, 1e3}) {
      GramCloud scaled;
      for (const auto& p : cloud.points) scaled.add({{p.g.g11 * s, p.g.g12 * s, p.g.g22 * s}, p.path, p.t});
      const auto rels = fit_relations(scaled, 2);
      CHECK(rels.size() == 2);
      for (const auto& r : rels) CHECK(relation_residual(r, scaled) <= 1e-6);
    }
  }

  TEST_CASE("leading form resultant") {
    const auto rels = fit_relations(miura_cloud(50), 2);
    REQUIRE(rels.size() == 2);
    CHECK(leading_form_resultant(rels[0], rels[1]) > 1e-6);

    // XZ and Z share the factor Z.
    PolyRelation xz{2, Eigen::VectorXd::Zero(10)}, z{1, Eigen::VectorXd::Zero(4)};
    xz.coeffs[6] = 1.0;
    z.coeffs[3] = 1.0;
    CHECK(leading_form_resultant(xz, z) < 1e-12);
  }

  TEST_CASE("median spacing and clusters") {
    std::vector<Eigen::Vector3d> a, b;
    for (int i = 0; i < 20; ++i) {
      a.push_back({1 + 0.01 * i, 0, 1});
      b.push_back({5 + 0.02 * i, 0, 5});
    }
    GramCloud cloud = synthetic(a, 0);
    for (const auto& p : synthetic(b, 1).points) cloud.add(p);
    CHECK(median_spacing(cloud) >= 0.01 - 1e-12);
    CHECK(median_spacing(cloud) <= 0.02 + 1e-12);
    const auto clusters = gram_clusters(cloud, 0.05);
    CHECK(clusters.size() == 2);
    CHECK(gram_clusters(cloud, 0.015).size() == 21);
  }

  TEST_CASE("local dimension") {
    const GramCloud miura = miura_cloud(50);
    const double r = 10 * median_spacing(miura);
    for (const auto& cd : local_dimension(miura, r)) CHECK(cd.dimension == 1);

    // A 2-D grid in the g11-g22 plane, one path per row.
    GramCloud grid;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) grid.add({{1 + 0.01 * j, 0, 1 + 0.01 * i}, i, static_cast<double>(j)});
    std::vector<std::size_t> all(grid.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CHECK(cluster_local_dimension(grid, all, 0.05) == 2);

    // Points stacked within the dedup radius collapse to a single point.
    GramCloud stacked;
    for (int i = 0; i < 20; ++i) stacked.add({{1, 0, 1 + 1e-14 * i}, 0, static_cast<double>(i)});
    CHECK(stacked.size() == 1);
    CHECK_THROWS_AS(cluster_local_dimension(stacked, {0}, 1.0), std::invalid_argument);
  }
}
