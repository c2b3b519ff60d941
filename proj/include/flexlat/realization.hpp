#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "flexlat/complex.hpp"

namespace flexlat {

using Vec3 = Eigen::Vector3d;

/// Positions of the orbit representatives together with the period vectors.
struct Realization {
  std::vector<Vec3> positions;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();

  /// Position of a lift: p_orbit + m a + k b.
  Vec3 position(const Lift& l) const {
    return positions[l.orbit] + static_cast<double>(l.shift.m) * a + static_cast<double>(l.shift.k) * b;
  }
  /// |a|^2 |b|^2 - (a.b)^2, the Gram determinant.
  double lattice_area_sq() const { return a.squaredNorm() * b.squaredNorm() - a.dot(b) * a.dot(b); }
};

struct GramMatrix {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;

  bool positive_definite() const { return g11 > 0.0 && g11 * g22 - g12 * g12 > 0.0; }
  Eigen::Vector3d vec() const { return {g11, g12, g22}; }
};

/// Squared lengths keyed by canonical edge; covers surface edges and aux
/// constraints.
using EdgeLengths = std::map<Edge, double>;

/// Gauge convention: positions[pinned] = 0, a = (a1, 0, 0) with a1 > 0 and
/// b = (b1, b2, 0) with b2 > 0.
struct GaugeFrame {
  int pinned = 0;
};

double edge_length_sq(const Realization& r, const Edge& e);

/// Throws std::invalid_argument for colinear period vectors.
GramMatrix gram(const Realization& r);

/// Rigidly moves r into the gauge frame.
Realization apply_gauge(const Realization& r, const GaugeFrame& frame = {});

EdgeLengths all_edge_lengths(const PeriodicComplex& c, const Realization& r);

/// edge_length_sq - target, one entry per constraint in c.constraints()
/// order. Throws std::out_of_range when a target entry is missing.
Eigen::VectorXd residuals(const PeriodicComplex& c, const Realization& r, const EdgeLengths& target);

/// Realization of change_of_basis(c, C): orbit (i, coset j) sits at
/// p_i + rep_j, and the period vectors become (a, b) C.
Realization refine_realization(const Realization& r, const IntMatrix2& C);

/// Proper rotation followed by a translation.
Realization rigid_motion(const Realization& r, const Eigen::Matrix3d& rotation, const Vec3& translation);

}  // namespace flexlat
