#include "flexlat/gramset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace flexlat {

void GramCloud::add(const GramPoint& p) {
  const Eigen::Vector3d v = p.vec();
  for (const auto& q : points)
    if ((q.vec() - v).cwiseAbs().maxCoeff() <= 1e-12) return;
  points.push_back(p);
}

GramCloud sample_gram(const std::vector<FlexPath>& paths) {
  GramCloud cloud;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (const auto& s : paths[i].samples) {
      if (!s.g.positive_definite()) throw std::invalid_argument("Gram sample is not positive definite");
      cloud.add({s.g, static_cast<int>(i), s.t});
    }
  return cloud;
}

std::vector<std::array<int, 3>> monomials(int degree) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) out.push_back({i, j, d - i - j});
  return out;
}

namespace {

using Exponent = std::array<int, 3>;

std::size_t monomial_count(int degree) {
  return static_cast<std::size_t>((degree + 1) * (degree + 2) * (degree + 3) / 6);
}

std::map<Exponent, std::size_t> monomial_index(int degree) {
  std::map<Exponent, std::size_t> index;
  const auto mons = monomials(degree);
  for (std::size_t i = 0; i < mons.size(); ++i) index[mons[i]] = i;
  return index;
}

double evaluate(const std::vector<Exponent>& mons, const Eigen::VectorXd& coeffs, const Eigen::Vector3d& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    const auto& e = mons[i];
    sum += coeffs[static_cast<Eigen::Index>(i)] * std::pow(p.x(), e[0]) * std::pow(p.y(), e[1]) *
           std::pow(p.z(), e[2]);
  }
  return sum;
}

Eigen::MatrixXd vandermonde(const std::vector<Eigen::Vector3d>& pts, int degree) {
  const auto mons = monomials(degree);
  Eigen::MatrixXd V(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(mons.size()));
  for (std::size_t r = 0; r < pts.size(); ++r)
    for (std::size_t c = 0; c < mons.size(); ++c) {
      const auto& e = mons[c];
      V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::pow(pts[r].x(), e[0]) * std::pow(pts[r].y(), e[1]) * std::pow(pts[r].z(), e[2]);
    }
  return V;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Coefficients of p((x - center) / scale) in the monomials of x.
Eigen::VectorXd to_original(const Eigen::VectorXd& coeffs, int degree, const Eigen::Vector3d& center, double scale) {
  const auto mons = monomials(degree);
  const auto index = monomial_index(degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.size());
  for (std::size_t m = 0; m < mons.size(); ++m) {
    const double c = coeffs[static_cast<Eigen::Index>(m)];
    if (c == 0.0) continue;
    const auto& e = mons[m];
    const double factor = c / std::pow(scale, e[0] + e[1] + e[2]);
    for (int i = 0; i <= e[0]; ++i)
      for (int j = 0; j <= e[1]; ++j)
        for (int k = 0; k <= e[2]; ++k) {
          const double w = binomial(e[0], i) * std::pow(-center.x(), e[0] - i) * binomial(e[1], j) *
                           std::pow(-center.y(), e[1] - j) * binomial(e[2], k) * std::pow(-center.z(), e[2] - k);
          out[static_cast<Eigen::Index>(index.at({i, j, k}))] += factor * w;
        }
  }
  return out;
}

// Orthonormal basis of the column span (columns with singular value above
// tol * largest).
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& M, double tol) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol * sv[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

double PolyRelation::operator()(const Eigen::Vector3d& p) const { return evaluate(monomials(degree), coeffs, p); }

int PolyRelation::effective_degree(double tol) const {
  const auto mons = monomials(degree);
  const double scale = coeffs.norm();
  int out = 0;
  for (std::size_t i = 0; i < mons.size(); ++i)
    if (std::abs(coeffs[static_cast<Eigen::Index>(i)]) > tol * scale)
      out = std::max(out, mons[i][0] + mons[i][1] + mons[i][2]);
  return out;
}

PolyRelation PolyRelation::leading_form() const {
  const int top = effective_degree();
  const auto mons = monomials(degree);
  PolyRelation out{degree, Eigen::VectorXd::Zero(coeffs.size())};
  for (std::size_t i = 0; i < mons.size(); ++i)
    if (mons[i][0] + mons[i][1] + mons[i][2] == top)
      out.coeffs[static_cast<Eigen::Index>(i)] = coeffs[static_cast<Eigen::Index>(i)];
  return out;
}

void PolyRelation::normalize() {
  const double n = coeffs.norm();
  if (n == 0.0) throw std::invalid_argument("zero polynomial");
  coeffs /= n;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    if (std::abs(coeffs[i]) > 1e-12) {
      if (coeffs[i] < 0) coeffs = -coeffs;
      break;
    }
}

std::vector<PolyRelation> fit_relations(const GramCloud& cloud, int degree, double svd_threshold) {
  if (degree < 0) throw std::invalid_argument("degree must be non-negative");
  const std::size_t needed = 2 * monomial_count(degree);
  if (cloud.size() < needed)
    throw std::invalid_argument("cloud has " + std::to_string(cloud.size()) + " points, degree " +
                                std::to_string(degree) + " needs " + std::to_string(needed));

  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) center += p.vec();
  center /= static_cast<double>(cloud.size());
  double scale = 0.0;
  for (const auto& p : cloud.points) scale = std::max(scale, (p.vec() - center).norm());
  if (scale == 0.0) scale = 1.0;
  std::vector<Eigen::Vector3d> pts;
  for (const auto& p : cloud.points) pts.push_back((p.vec() - center) / scale);

  // Relations so far, in scaled coordinates, with their own degree.
  std::vector<PolyRelation> found;
  std::vector<PolyRelation> out;
  for (int d = 1; d <= degree; ++d) {
    const Eigen::MatrixXd V = vandermonde(pts, d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < V.cols(); ++i)
      if (i >= sv.size() || sv[i] < svd_threshold * sv[0]) null_cols.push_back(i);
    if (null_cols.empty()) continue;
    Eigen::MatrixXd N(V.cols(), static_cast<Eigen::Index>(null_cols.size()));
    for (std::size_t j = 0; j < null_cols.size(); ++j) N.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(null_cols[j]);

    // Monomial multiples of the lower-degree relations.
    const auto index = monomial_index(d);
    std::vector<Eigen::VectorXd> multiples;
    for (const auto& r : found) {
      const auto rmons = monomials(r.degree);
      for (const auto& m : monomials(d - r.degree)) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(V.cols());
        for (std::size_t i = 0; i < rmons.size(); ++i)
          v[static_cast<Eigen::Index>(index.at({rmons[i][0] + m[0], rmons[i][1] + m[1], rmons[i][2] + m[2]}))] +=
              r.coeffs[static_cast<Eigen::Index>(i)];
        multiples.push_back(std::move(v));
      }
    }
    Eigen::MatrixXd M(V.cols(), static_cast<Eigen::Index>(multiples.size()));
    for (std::size_t j = 0; j < multiples.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = multiples[j];
    const Eigen::MatrixXd Q = orthonormal_span(M, 1e-9);
    const Eigen::MatrixXd rest = N - Q * (Q.transpose() * N);

    Eigen::JacobiSVD<Eigen::MatrixXd> split(rest, Eigen::ComputeThinU);
    for (Eigen::Index i = 0; i < split.singularValues().size(); ++i) {
      if (split.singularValues()[i] < 0.5) break;
      PolyRelation scaled{d, split.matrixU().col(i)};
      found.push_back(scaled);
      PolyRelation original{d, to_original(scaled.coeffs, d, center, scale)};
      original.normalize();
      out.push_back(std::move(original));
    }
  }
  return out;
}

double relation_residual(const PolyRelation& rel, const GramCloud& cloud) {
  const double norm = rel.coeffs.norm();
  if (norm == 0.0) throw std::invalid_argument("zero polynomial");
  double worst = 0.0;
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d v = p.vec();
    const double scale = std::pow(std::max(1.0, v.norm()), rel.degree);
    worst = std::max(worst, std::abs(rel(v)) / (norm * scale));
  }
  return worst;
}

namespace {

// Polynomials in X, Y.
using Poly2 = std::map<std::pair<int, int>, double>;

Poly2 mul(const Poly2& a, const Poly2& b) {
  Poly2 out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) out[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
  return out;
}

Poly2 add(Poly2 a, const Poly2& b, double sign) {
  for (const auto& [e, c] : b) a[e] += sign * c;
  return a;
}

Poly2 determinant(const std::vector<std::vector<Poly2>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return {{{0, 0}, 1.0}};
  if (n == 1) return m[0][0];
  Poly2 out;
  for (std::size_t col = 0; col < n; ++col) {
    if (m[0][col].empty()) continue;
    std::vector<std::vector<Poly2>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Poly2> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != col) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    out = add(out, mul(m[0][col], determinant(minor)), col % 2 == 0 ? 1.0 : -1.0);
  }
  return out;
}

// Coefficients of Z^0 .. Z^n, dropping entries below tol * norm.
std::vector<Poly2> in_z(const PolyRelation& r, double tol) {
  const auto mons = monomials(r.degree);
  const double norm = r.coeffs.norm();
  std::vector<Poly2> out;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    const double c = r.coeffs[static_cast<Eigen::Index>(i)] / norm;
    if (std::abs(c) <= tol) continue;
    const int k = mons[i][2];
    if (static_cast<int>(out.size()) <= k) out.resize(k + 1);
    out[k][{mons[i][0], mons[i][1]}] += c;
  }
  return out;
}

}  // namespace

double leading_form_resultant(const PolyRelation& f, const PolyRelation& g) {
  const auto a = in_z(f.leading_form(), 1e-9);
  const auto b = in_z(g.leading_form(), 1e-9);
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t m = a.size() - 1;
  const std::size_t n = b.size() - 1;
  const std::size_t size = m + n;
  std::vector<std::vector<Poly2>> syl(size, std::vector<Poly2>(size));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) syl[r][r + i] = a[m - i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) syl[n + r][r + i] = b[n - i];
  double norm2 = 0.0;
  for (const auto& [e, c] : determinant(syl)) norm2 += c * c;
  return std::sqrt(norm2);
}

std::vector<std::vector<std::size_t>> gram_clusters(const GramCloud& cloud, double link_radius) {
  const std::size_t n = cloud.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (cloud.points[i].path == cloud.points[j].path &&
          (cloud.points[i].vec() - cloud.points[j].vec()).norm() <= link_radius)
        parent[find(i)] = find(j);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

double median_spacing(const GramCloud& cloud) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < cloud.size(); ++i)
    if (cloud.points[i].path == cloud.points[i - 1].path)
      gaps.push_back((cloud.points[i].vec() - cloud.points[i - 1].vec()).norm());
  if (gaps.empty()) return 0.0;
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
  return gaps[gaps.size() / 2];
}

int cluster_local_dimension(const GramCloud& cloud, const std::vector<std::size_t>& members, double radius,
                            double tolerance) {
  int dimension = -1;
  for (std::size_t c : members) {
    const Eigen::Vector3d centre = cloud.points[c].vec();
    std::vector<Eigen::Vector3d> near;
    for (std::size_t j : members)
      if ((cloud.points[j].vec() - centre).norm() <= radius) near.push_back(cloud.points[j].vec());
    if (near.size() < kMinLocalPoints) continue;
    Eigen::MatrixXd P(static_cast<Eigen::Index>(near.size()), 3);
    for (std::size_t i = 0; i < near.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = near[i].transpose();
    P.rowwise() -= P.colwise().mean();
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues();
    int rank = 0;
    if (sv[0] > 0.0)
      for (int i = 0; i < 3; ++i)
        if (sv[i] > tolerance * sv[0]) ++rank;
    dimension = std::max(dimension, rank);
  }
  if (dimension < 0)
    throw std::invalid_argument("no point has " + std::to_string(kMinLocalPoints) + " neighbours within radius");
  return dimension;
}

std::vector<ClusterDimension> local_dimension(const GramCloud& cloud, double radius, double tolerance) {
  std::vector<ClusterDimension> out;
  for (auto& members : gram_clusters(cloud, radius)) {
    const int d = cluster_local_dimension(cloud, members, radius, tolerance);
    out.push_back({std::move(members), d});
  }
  return out;
}

}  // namespace flexlat
