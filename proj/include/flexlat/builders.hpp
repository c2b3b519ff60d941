#pragma once

#include <vector>

#include "flexlat/complex.hpp"
#include "flexlat/flex.hpp"
#include "flexlat/realization.hpp"

namespace flexlat {

/// Families of straight edge lines along which a flat periodic plane can be
/// folded into an accordion.
enum class FoldFamily {
  kParallelA,        // lines p + k b + R a
  kParallelB,        // lines p + m a + R b
  kParallelAMinusB,  // lines p + m a + R (a - b)
};

std::string to_string(FoldFamily f);

/// A flat periodic plane built from a one-orbit lattice triangulation and
/// refined to a sublattice. `cells[o]` is the position of orbit o's
/// representative in the original lattice basis (a, b).
struct PlaneModel {
  PeriodicComplex complex;
  Realization flat;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  IntMatrix2 sublattice;
  std::vector<LatticeVector> cells;
  std::vector<FoldFamily> fold_families;
};

/// Plane cut by the lines parallel to a, b and a - b; refined by C.
PlaneModel triangulated_plane(const Vec3& a, const Vec3& b, const IntMatrix2& C = IntMatrix2::identity());

/// Square grid of the given side; every square is split by its (a + b)
/// diagonal and the other diagonal is kept as an aux constraint so that the
/// square moves rigidly.
PlaneModel grid_squares(double side, const IntMatrix2& C = IntMatrix2::identity());

/// Accordion fold at angle phi: strips between consecutive fold lines tilt
/// alternately by +phi and -phi. Throws std::invalid_argument when the
/// refined lattice does not map even strips to even strips.
Realization folded_plane_realization(const PlaneModel& model, double phi, FoldFamily family);
Configuration folded_plane_seed(const PlaneModel& model, double phi, FoldFamily family);

struct MiuraParams {
  double alpha = 0.0;   // acute parallelogram angle
  double a0_len = 0.0;  // |a0|
  double b0_len = 0.0;  // |b0|
  double z = 0.0;       // vertical offset of the horizontal crease vector

  /// Throws std::invalid_argument when the parameters are not admissible.
  void check() const;
  double a_len() const;     // |a| after folding
  double x_offset() const;  // horizontal zig-zag of the other crease vector
  double b_len() const;     // |b| after folding
};

struct MiuraModel {
  PeriodicComplex complex;
  Realization realization;
};

/// Four orbits (a 2x2 block of parallelograms), each parallelogram split by
/// one diagonal with the other diagonal as an aux constraint.
MiuraModel miura_ori(const MiuraParams& p);

/// Replaces triangle t by three triangles around a new orbit (id n_orbits).
PeriodicComplex star_subdivide(const PeriodicComplex& c, const Triangle& t);

/// Realization of star_subdivide(c, t): the new vertex sits at the centroid.
Realization star_subdivide_realization(const Realization& r, const Triangle& t);

}  // namespace flexlat
