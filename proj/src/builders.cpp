#include "flexlat/builders.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flexlat {

std::string to_string(FoldFamily f) {
  switch (f) {
    case FoldFamily::kParallelA: return "a";
    case FoldFamily::kParallelB: return "b";
    case FoldFamily::kParallelAMinusB: return "a-b";
  }
  return "unknown";
}

namespace {

PlaneModel refine_plane(const PeriodicComplex& base, const Vec3& a, const Vec3& b, const IntMatrix2& C) {
  if (C.det() == 0) throw std::invalid_argument("singular sublattice matrix");
  Realization r;
  r.positions = {Vec3::Zero()};
  r.a = a;
  r.b = b;
  gram(r);  // rejects colinear a, b

  PlaneModel model;
  model.complex = change_of_basis(base, C);
  model.flat = refine_realization(r, C);
  model.a = a;
  model.b = b;
  model.sublattice = C;
  model.cells = Sublattice(C).coset_representatives();
  return model;
}

}  // namespace

PlaneModel triangulated_plane(const Vec3& a, const Vec3& b, const IntMatrix2& C) {
  const Lift o{0, {0, 0}};
  auto at = [](std::int64_t m, std::int64_t k) { return Lift{0, {m, k}}; };
  const PeriodicComplex base = PeriodicComplex::make(
      1, {Edge::canonical(0, 0, {1, 0}), Edge::canonical(0, 0, {0, 1}), Edge::canonical(0, 0, {1, -1})},
      {Triangle::canonical(o, at(1, 0), at(0, 1)), Triangle::canonical(at(1, 0), at(1, 1), at(0, 1))});
  PlaneModel model = refine_plane(base, a, b, C);
  model.fold_families = {FoldFamily::kParallelA, FoldFamily::kParallelB, FoldFamily::kParallelAMinusB};
  return model;
}

PlaneModel grid_squares(double side, const IntMatrix2& C) {
  if (!(side > 0.0)) throw std::invalid_argument("grid side must be positive");
  const Lift o{0, {0, 0}};
  auto at = [](std::int64_t m, std::int64_t k) { return Lift{0, {m, k}}; };
  const PeriodicComplex base = PeriodicComplex::make(
      1, {Edge::canonical(0, 0, {1, 0}), Edge::canonical(0, 0, {0, 1}), Edge::canonical(0, 0, {1, 1})},
      {Triangle::canonical(o, at(1, 0), at(1, 1)), Triangle::canonical(o, at(1, 1), at(0, 1))},
      {Edge::canonical(0, 0, {-1, 1})});
  PlaneModel model = refine_plane(base, Vec3(side, 0.0, 0.0), Vec3(0.0, side, 0.0), C);
  model.fold_families = {FoldFamily::kParallelA, FoldFamily::kParallelB};
  return model;
}

Realization folded_plane_realization(const PlaneModel& model, double phi, FoldFamily family) {
  if (std::find(model.fold_families.begin(), model.fold_families.end(), family) == model.fold_families.end())
    throw std::invalid_argument("fold family " + to_string(family) + " is not a family of surface edge lines");

  const Vec3& a = model.a;
  const Vec3& b = model.b;
  Vec3 line_dir;
  Vec3 across;
  auto strip = [family](LatticeVector v) -> std::int64_t {
    switch (family) {
      case FoldFamily::kParallelA: return v.k;
      case FoldFamily::kParallelB: return v.m;
      case FoldFamily::kParallelAMinusB: return v.m + v.k;
    }
    return 0;
  };
  switch (family) {
    case FoldFamily::kParallelA:
      line_dir = a.normalized();
      across = b - b.dot(line_dir) * line_dir;
      break;
    case FoldFamily::kParallelB:
      line_dir = b.normalized();
      across = a - a.dot(line_dir) * line_dir;
      break;
    case FoldFamily::kParallelAMinusB:
      line_dir = (a - b).normalized();
      across = a - a.dot(line_dir) * line_dir;
      break;
  }
  const double width = across.norm();
  const Vec3 normal_in_plane = across / width;
  const Vec3 up = line_dir.cross(normal_in_plane);

  for (int c = 0; c < 2; ++c)
    if (strip(model.sublattice.column(c)) % 2 != 0)
      throw std::invalid_argument("sublattice does not preserve the strip parity of fold family " +
                                  to_string(family));

  const double cos_phi = std::cos(phi);
  const double sin_phi = std::sin(phi);
  auto fold = [&](LatticeVector v) -> Vec3 {
    const Vec3 flat = static_cast<double>(v.m) * a + static_cast<double>(v.k) * b;
    const std::int64_t s = strip(v);
    const double lift = (s % 2 != 0) ? width * sin_phi : 0.0;
    return flat.dot(line_dir) * line_dir + static_cast<double>(s) * width * cos_phi * normal_in_plane + lift * up;
  };

  Realization r;
  for (const auto& cell : model.cells) r.positions.push_back(fold(cell));
  r.a = fold(model.sublattice.column(0));
  r.b = fold(model.sublattice.column(1));
  return r;
}

Configuration folded_plane_seed(const PlaneModel& model, double phi, FoldFamily family) {
  return Configuration::from_realization(folded_plane_realization(model, phi, family));
}

void MiuraParams::check() const {
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2)) throw std::invalid_argument("alpha must lie in (0, pi/2)");
  if (!(a0_len > 0.0 && b0_len > 0.0)) throw std::invalid_argument("|a0| and |b0| must be positive");
  if (!(2.0 * std::abs(z) > 0.0 && 2.0 * std::abs(z) < a0_len))
    throw std::invalid_argument("fold offset must satisfy 0 < 2|z| < |a0|");
  const double x = x_offset();
  const double sin_a = std::sin(alpha);
  if (!(4.0 * x * x < b0_len * b0_len / (sin_a * sin_a)))
    throw std::invalid_argument("fold is past the fully folded state (4x^2 >= |b0|^2 / sin^2 alpha)");
}

double MiuraParams::a_len() const { return std::sqrt(a0_len * a0_len - 4.0 * z * z); }

double MiuraParams::x_offset() const { return a0_len * b0_len / (std::tan(alpha) * 2.0 * a_len()); }

double MiuraParams::b_len() const {
  const double s = std::sin(alpha);
  const double x = x_offset();
  return std::sqrt(b0_len * b0_len / (s * s) - 4.0 * x * x);
}

MiuraModel miura_ori(const MiuraParams& p) {
  p.check();
  const double a = p.a_len();
  const double b = p.b_len();
  const double x = p.x_offset();

  // Crease grid vertex (i, j), i, j in {0, 1}; odd columns are raised by z,
  // odd rows shifted by x.
  auto orbit = [](int i, int j) { return (i % 2) + 2 * (j % 2); };
  auto lift = [&](int i, int j) { return Lift{orbit(i, j), {i / 2, j / 2}}; };

  std::vector<Edge> edges;
  std::vector<Edge> aux;
  std::vector<Triangle> tris;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const Lift A = lift(i, j), B = lift(i + 1, j), C = lift(i + 1, j + 1), D = lift(i, j + 1);
      edges.push_back(Edge::between(A, B));
      edges.push_back(Edge::between(A, D));
      edges.push_back(Edge::between(A, C));
      aux.push_back(Edge::between(B, D));
      tris.push_back(Triangle::canonical(A, B, C));
      tris.push_back(Triangle::canonical(A, C, D));
    }

  MiuraModel model;
  model.complex = PeriodicComplex::make(4, std::move(edges), std::move(tris), std::move(aux));
  model.realization.positions.resize(4);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      model.realization.positions[orbit(i, j)] =
          Vec3(i * a / 2 + (j % 2 ? x : 0.0), j * b / 2, i % 2 ? p.z : 0.0);
  model.realization.a = Vec3(a, 0.0, 0.0);
  model.realization.b = Vec3(0.0, b, 0.0);
  return model;
}

PeriodicComplex star_subdivide(const PeriodicComplex& c, const Triangle& t) {
  const Triangle tc = Triangle::canonical(t.corners[0], t.corners[1], t.corners[2]);
  if (!c.has_triangle(tc)) throw std::invalid_argument("triangle " + tc.str() + " is not in the complex");

  const int center = c.n_orbits();
  const Lift mid{center, {0, 0}};
  std::vector<Edge> edges = c.edges();
  std::vector<Triangle> tris;
  for (const auto& x : c.triangles())
    if (x != tc) tris.push_back(x);
  for (int i = 0; i < 3; ++i) {
    const Lift& p = tc.corners[i];
    const Lift& q = tc.corners[(i + 1) % 3];
    edges.push_back(Edge::between(p, mid));
    tris.push_back(Triangle::canonical(p, q, mid));
  }
  return PeriodicComplex::make(center + 1, std::move(edges), std::move(tris), c.aux_constraints());
}

Realization star_subdivide_realization(const Realization& r, const Triangle& t) {
  const Triangle tc = Triangle::canonical(t.corners[0], t.corners[1], t.corners[2]);
  Realization out = r;
  Vec3 centroid = Vec3::Zero();
  for (const auto& corner : tc.corners) centroid += r.position(corner) / 3.0;
  out.positions.push_back(centroid);
  return out;
}

}  // namespace flexlat
