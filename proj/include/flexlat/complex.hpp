#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "flexlat/lattice.hpp"

namespace flexlat {

/// A vertex of the periodic plane K: the lift of orbit representative `orbit`
/// translated by `shift`.
struct Lift {
  int orbit = 0;
  LatticeVector shift;

  friend constexpr auto operator<=>(const Lift&, const Lift&) = default;
  Lift translated(LatticeVector t) const { return {orbit, shift + t}; }
};

/// Edge orbit joining the base lift of u to the lift of v translated by
/// `shift`. Always stored canonically: u < v, or u == v with a lex-positive
/// shift.
struct Edge {
  int u = 0;
  int v = 0;
  LatticeVector shift;

  static Edge canonical(int u, int v, LatticeVector shift);
  static Edge between(const Lift& from, const Lift& to) {
    return canonical(from.orbit, to.orbit, to.shift - from.shift);
  }

  bool is_self_edge() const { return u == v; }
  std::string str() const;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Oriented triangle orbit. Canonical form: the cyclic rotation whose
/// translate (first corner at shift 0) is lexicographically least.
struct Triangle {
  std::array<Lift, 3> corners;

  static Triangle canonical(const Lift& a, const Lift& b, const Lift& c);
  Triangle reversed() const { return canonical(corners[0], corners[2], corners[1]); }
  std::array<Edge, 3> edges() const;
  std::string str() const;
  friend constexpr auto operator<=>(const Triangle&, const Triangle&) = default;
};

/// Torus quotient K / Lambda of a periodic simplicial plane. Immutable once
/// built: edges, triangles and aux constraints are canonicalized, sorted and
/// deduplicated by make().
class PeriodicComplex {
 public:
  PeriodicComplex() = default;
  static PeriodicComplex make(int n_orbits, std::vector<Edge> edges, std::vector<Triangle> triangles,
                              std::vector<Edge> aux = {});

  int n_orbits() const { return n_orbits_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& aux_constraints() const { return aux_; }

  bool has_edge(const Edge& e) const;
  bool has_triangle(const Triangle& t) const;
  /// True when t or its reverse is a triangle orbit.
  bool has_unoriented_triangle(const Triangle& t) const;

  /// Surface edges followed by aux constraints, each in canonical order. This
  /// is the row order of every residual vector and Jacobian.
  std::vector<Edge> constraints() const;

  /// Neighbours of the base lift of `orbit` (one entry per incident edge end).
  std::vector<Lift> neighbours(int orbit) const;
  int degree(int orbit) const;

  friend bool operator==(const PeriodicComplex&, const PeriodicComplex&) = default;

 private:
  int n_orbits_ = 0;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> aux_;
};

enum class ViolationKind {
  kOrbitOutOfRange,
  kZeroSelfEdge,
  kNonPrimitiveSelfEdge,
  kDegenerateTriangle,
  kMissingTriangleEdge,
  kEdgeTriangleCount,
  kInconsistentOrientation,
  kLinkNotCycle,
  kEulerCharacteristic,
  kDisconnected,
  kCoverNotPlane,
  kBadAuxConstraint,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate(const PeriodicComplex& c);

int euler_characteristic(const PeriodicComplex& c);

/// Quotient of the same plane by the sublattice spanned by the columns of C.
/// New orbit (i, coset j) gets id i * index + j.
PeriodicComplex change_of_basis(const PeriodicComplex& c, const IntMatrix2& C);

std::vector<int> special_orbits(const PeriodicComplex& c);
bool is_special(const PeriodicComplex& c, int orbit);

/// Link of the base lift of `orbit`, as a cycle of lifts following the
/// triangle orientation, starting at the least lift. Empty when the link is
/// not a single cycle.
std::vector<Lift> vertex_link(const PeriodicComplex& c, int orbit);

/// Lattice cells [m_begin, m_end) x [k_begin, k_end).
struct CellRange {
  std::int64_t m_begin = 0, m_end = 0, k_begin = 0, k_end = 0;

  static CellRange square(std::int64_t n) { return {0, n, 0, n}; }
  static CellRange centered(std::int64_t radius) { return {-radius, radius + 1, -radius, radius + 1}; }
  bool empty() const { return m_end <= m_begin || k_end <= k_begin; }
  bool contains(LatticeVector s) const {
    return s.m >= m_begin && s.m < m_end && s.k >= k_begin && s.k < k_end;
  }
};

/// Finite piece of the universal cover: every lift whose translate lies in the
/// range, and every simplex all of whose vertices do.
struct LiftPatch {
  std::vector<Lift> vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;

  int euler_characteristic() const {
    return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(triangles.size());
  }
};

LiftPatch lift_patch(const PeriodicComplex& c, const CellRange& cells);

/// Isomorphism up to relabelling orbits and re-choosing orbit representatives
/// (same period lattice). Orientation may be reversed.
bool isomorphic(const PeriodicComplex& a, const PeriodicComplex& b);

}  // namespace flexlat
