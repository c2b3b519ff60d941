#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flexlat/flex.hpp"
#include "flexlat/realization.hpp"

namespace flexlat {

struct GramPoint {
  GramMatrix g;
  int path = 0;
  double t = 0.0;

  Eigen::Vector3d vec() const { return {g.g11, g.g12, g.g22}; }
};

struct GramCloud {
  std::vector<GramPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  /// Appends, skipping points within 1e-12 of one already present.
  void add(const GramPoint& p);
};

/// Samples of every path, tagged with the path index. Throws
/// std::invalid_argument on a non positive definite sample.
GramCloud sample_gram(const std::vector<FlexPath>& paths);

/// Exponents (i, j, k) of X^i Y^j Z^k, i + j + k <= degree: by degree, and
/// within a degree in decreasing lexicographic order (1, X, Y, Z, X^2, XY, ...).
std::vector<std::array<int, 3>> monomials(int degree);

inline constexpr const char* kMonomialOrder = "gradedlex-XYZ";

struct PolyRelation {
  int degree = 0;
  Eigen::VectorXd coeffs;  // over monomials(degree)

  double operator()(const Eigen::Vector3d& p) const;
  /// Top-degree homogeneous part, as a relation of the same degree.
  PolyRelation leading_form() const;
  int effective_degree(double tol = 1e-9) const;
  /// Unit norm, first coefficient above 1e-12 positive.
  void normalize();
};

/// Relations of degree <= D satisfied by the cloud. Relations of each degree
/// are reduced modulo monomial multiples of the lower-degree ones, so every
/// returned relation is new. Throws std::invalid_argument when the cloud has
/// fewer than 2 * |monomials(D)| points.
std::vector<PolyRelation> fit_relations(const GramCloud& cloud, int degree, double svd_threshold = 1e-7);

/// max_p |rel(p)| / (|coeffs| * max(1, |p|)^D).
double relation_residual(const PolyRelation& rel, const GramCloud& cloud);

/// Coefficient norm of the resultant with respect to Z of the leading forms
/// of f and g (each scaled to unit norm first). Zero iff the leading forms
/// share a factor involving Z.
double leading_form_resultant(const PolyRelation& f, const PolyRelation& g);

inline constexpr double kDefaultDimensionTolerance = 0.05;
inline constexpr std::size_t kMinLocalPoints = 10;

/// Connected components of the graph joining points of the same path that
/// lie within link_radius of each other.
std::vector<std::vector<std::size_t>> gram_clusters(const GramCloud& cloud, double link_radius);

/// Median distance between consecutive samples of the same path.
double median_spacing(const GramCloud& cloud);

/// Largest local rank over centres of `members` with at least kMinLocalPoints
/// points within `radius`: singular values of the centred neighbourhood above
/// tolerance * largest. Throws std::invalid_argument when no centre qualifies.
int cluster_local_dimension(const GramCloud& cloud, const std::vector<std::size_t>& members, double radius,
                            double tolerance = kDefaultDimensionTolerance);

struct ClusterDimension {
  std::vector<std::size_t> members;
  int dimension = 0;
};

std::vector<ClusterDimension> local_dimension(const GramCloud& cloud, double radius,
                                              double tolerance = kDefaultDimensionTolerance);

}  // namespace flexlat
