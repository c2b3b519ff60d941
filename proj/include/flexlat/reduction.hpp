#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flexlat/complex.hpp"
#include "flexlat/realization.hpp"

namespace flexlat {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shift lambda shared (up to sign) by the self-edges of every special orbit,
/// lex-positive and lexicographically least. Absent when no orbit is special;
/// throws ReductionError when the special orbits share no shift.
std::optional<LatticeVector> common_special_shift(const PeriodicComplex& c);

/// Cylinder decomposition of a complex all of whose orbits are special.
/// chain[i] = v_i, chain[q] = T_mu(v_0); cylinder i is bounded by the lines
/// through v_i and v_{i+1} and carries the triangles [v_i v_i' v_{i+1}] and
/// [v_i' v_{i+1}' v_{i+1}] with v' = T_lambda(v).
struct BaseCaseStructure {
  LatticeVector lambda;
  LatticeVector mu;
  std::vector<Lift> chain;
  std::vector<int> order;  // orbit of v_0, ..., v_{q-1}

  struct Cylinder {
    Edge along;     // [v_i v_i']
    Edge rung;      // [v_i v_{i+1}]
    Edge diagonal;  // [v_i' v_{i+1}]
  };
  std::vector<Cylinder> cylinders;

  int q() const { return static_cast<int>(order.size()); }
};

/// Throws ReductionError when some orbit is not special or the complex does
/// not have the cylinder pattern.
BaseCaseStructure base_case_structure(const PeriodicComplex& c);

struct BasisInnerProducts {
  double lambda_lambda = 0.0;
  double lambda_mu = 0.0;
};

/// (lambda, lambda) and (lambda, mu) from squared edge lengths alone, by the
/// polarization sum over the cylinders. Throws std::out_of_range when a length
/// is missing.
BasisInnerProducts basis_inner_products(const BaseCaseStructure& s, const EdgeLengths& lengths);

/// Witness corners as a triangle in canonical form over both orientations.
using EmptyTriangle = Triangle;

std::vector<EmptyTriangle> find_empty_triangles(const PeriodicComplex& c);
/// Lexicographically least witness.
std::optional<EmptyTriangle> find_empty_triangle(const PeriodicComplex& c);

/// Replace every translate of the disk bounded by `witness` by one triangle.
/// `orbit_map`, when given, receives the old id of every new orbit. Throws
/// std::invalid_argument for a stale witness and ReductionError when the disk
/// is not found within 64 cells.
PeriodicComplex collapse_empty_triangle(const PeriodicComplex& c, const EmptyTriangle& witness,
                                        std::vector<int>* orbit_map = nullptr);

/// Replace the triangles [u v_i v_{i+1}], [u v_{i+1} v_{i+2}] around the base
/// lift of u (link order of vertex_link) by [u v_i v_{i+2}], [v_i v_{i+1} v_{i+2}].
/// Throws std::invalid_argument on a violated precondition.
PeriodicComplex flip(const PeriodicComplex& c, int u, int i);

/// Link indices at u where flip would succeed.
std::vector<int> valid_diagonals(const PeriodicComplex& c, int u);

/// (number of non-special orbits, least degree of a non-special orbit); the
/// second entry is 0 when every orbit is special.
using Measure = std::pair<int, int>;
Measure reduction_measure(const PeriodicComplex& c);

enum class DiagonalStrategy {
  kFirstValid,
  kLastValid,
};

struct ReductionMove {
  enum class Kind { kCollapse, kFlip };
  Kind kind = Kind::kCollapse;
  Measure before;
  EmptyTriangle witness;          // collapse
  std::vector<int> removed;       // collapse: original orbit ids
  int vertex = -1;                // flip: original orbit id
  int diagonal = -1;              // flip
};

struct ReductionTrace {
  std::vector<ReductionMove> moves;
  Measure final_measure;
  PeriodicComplex final_complex;
  std::vector<int> orbit_map;  // final orbit id -> input orbit id
};

/// Collapse empty triangles while there are any, otherwise flip at the least
/// non-special orbit of minimal degree. Throws ReductionError when the measure
/// fails to drop, a move breaks validity, or the move budget
/// 10 * (n_orbits + |edges|) runs out.
ReductionTrace reduce(const PeriodicComplex& c, DiagonalStrategy strategy = DiagonalStrategy::kFirstValid);

}  // namespace flexlat
