#include "flexlat/realization.hpp"

#include <cmath>
#include <stdexcept>

namespace flexlat {

double edge_length_sq(const Realization& r, const Edge& e) {
  const Vec3 d = r.position({e.v, e.shift}) - r.positions[e.u];
  return d.squaredNorm();
}

GramMatrix gram(const Realization& r) {
  const double scale = r.a.squaredNorm() * r.b.squaredNorm();
  if (!(r.lattice_area_sq() > 1e-14 * scale) || scale == 0.0)
    throw std::invalid_argument("period vectors are colinear");
  return {r.a.squaredNorm(), r.a.dot(r.b), r.b.squaredNorm()};
}

Realization rigid_motion(const Realization& r, const Eigen::Matrix3d& rotation, const Vec3& translation) {
  Realization out;
  out.positions.reserve(r.positions.size());
  for (const auto& p : r.positions) out.positions.push_back(rotation * p + translation);
  out.a = rotation * r.a;
  out.b = rotation * r.b;
  return out;
}

Realization apply_gauge(const Realization& r, const GaugeFrame& frame) {
  gram(r);  // rejects colinear period vectors
  if (frame.pinned < 0 || frame.pinned >= static_cast<int>(r.positions.size()))
    throw std::invalid_argument("pinned vertex out of range");

  const Vec3 e1 = r.a.normalized();
  const Vec3 e2 = (r.b - r.b.dot(e1) * e1).normalized();
  const Vec3 e3 = e1.cross(e2);
  Eigen::Matrix3d rot;
  rot.row(0) = e1.transpose();
  rot.row(1) = e2.transpose();
  rot.row(2) = e3.transpose();

  Realization out = rigid_motion(r, rot, -(rot * r.positions[frame.pinned]));
  // Exact zeros for the gauge-fixed components.
  out.positions[frame.pinned].setZero();
  out.a = Vec3(r.a.norm(), 0.0, 0.0);
  out.b = Vec3(r.b.dot(e1), r.b.dot(e2), 0.0);
  return out;
}

EdgeLengths all_edge_lengths(const PeriodicComplex& c, const Realization& r) {
  EdgeLengths out;
  for (const auto& e : c.constraints()) out[e] = edge_length_sq(r, e);
  return out;
}

Eigen::VectorXd residuals(const PeriodicComplex& c, const Realization& r, const EdgeLengths& target) {
  const auto cons = c.constraints();
  Eigen::VectorXd out(static_cast<Eigen::Index>(cons.size()));
  for (std::size_t i = 0; i < cons.size(); ++i) {
    auto it = target.find(cons[i]);
    if (it == target.end()) throw std::out_of_range("no target length for constraint " + cons[i].str());
    out[static_cast<Eigen::Index>(i)] = edge_length_sq(r, cons[i]) - it->second;
  }
  return out;
}

Realization refine_realization(const Realization& r, const IntMatrix2& C) {
  const Sublattice sub(C);
  const auto& reps = sub.coset_representatives();
  Realization out;
  out.positions.reserve(r.positions.size() * reps.size());
  for (const auto& p : r.positions)
    for (const auto& rep : reps)
      out.positions.push_back(p + static_cast<double>(rep.m) * r.a + static_cast<double>(rep.k) * r.b);
  out.a = static_cast<double>(C(0, 0)) * r.a + static_cast<double>(C(1, 0)) * r.b;
  out.b = static_cast<double>(C(0, 1)) * r.a + static_cast<double>(C(1, 1)) * r.b;
  return out;
}

}  // namespace flexlat
