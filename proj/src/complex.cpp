#include "flexlat/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace flexlat {

Edge Edge::canonical(int u, int v, LatticeVector shift) {
  if (u > v || (u == v && !shift.lex_positive() && !shift.is_zero())) return {v, u, -shift};
  return {u, v, shift};
}

std::string Edge::str() const {
  std::ostringstream os;
  os << "[" << u << "," << v << "," << shift.m << "," << shift.k << "]";
  return os.str();
}

Triangle Triangle::canonical(const Lift& a, const Lift& b, const Lift& c) {
  const std::array<std::array<Lift, 3>, 3> rotations{{{a, b, c}, {b, c, a}, {c, a, b}}};
  std::optional<std::array<Lift, 3>> best;
  for (const auto& rot : rotations) {
    const LatticeVector t = rot[0].shift;
    std::array<Lift, 3> cand{rot[0].translated(-t), rot[1].translated(-t), rot[2].translated(-t)};
    if (!best || cand < *best) best = cand;
  }
  return Triangle{*best};
}

std::array<Edge, 3> Triangle::edges() const {
  return {Edge::between(corners[0], corners[1]), Edge::between(corners[1], corners[2]),
          Edge::between(corners[2], corners[0])};
}

std::string Triangle::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < 3; ++i) {
    if (i) os << " ";
    os << corners[i].orbit << corners[i].shift.str();
  }
  os << "]";
  return os.str();
}

PeriodicComplex PeriodicComplex::make(int n_orbits, std::vector<Edge> edges, std::vector<Triangle> triangles,
                                      std::vector<Edge> aux) {
  auto canon_edges = [](std::vector<Edge>& list) {
    for (auto& e : list) e = Edge::canonical(e.u, e.v, e.shift);
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  };
  canon_edges(edges);
  canon_edges(aux);
  for (auto& t : triangles) t = Triangle::canonical(t.corners[0], t.corners[1], t.corners[2]);
  std::sort(triangles.begin(), triangles.end());
  triangles.erase(std::unique(triangles.begin(), triangles.end()), triangles.end());

  PeriodicComplex c;
  c.n_orbits_ = n_orbits;
  c.edges_ = std::move(edges);
  c.triangles_ = std::move(triangles);
  c.aux_ = std::move(aux);
  return c;
}

bool PeriodicComplex::has_edge(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge::canonical(e.u, e.v, e.shift));
}

bool PeriodicComplex::has_triangle(const Triangle& t) const {
  return std::binary_search(triangles_.begin(), triangles_.end(), t);
}

bool PeriodicComplex::has_unoriented_triangle(const Triangle& t) const {
  return has_triangle(t) || has_triangle(t.reversed());
}

std::vector<Edge> PeriodicComplex::constraints() const {
  std::vector<Edge> out = edges_;
  out.insert(out.end(), aux_.begin(), aux_.end());
  return out;
}

std::vector<Lift> PeriodicComplex::neighbours(int orbit) const {
  std::vector<Lift> out;
  for (const auto& e : edges_) {
    if (e.u == orbit) out.push_back({e.v, e.shift});
    if (e.v == orbit) out.push_back({e.u, -e.shift});
  }
  return out;
}

int PeriodicComplex::degree(int orbit) const { return static_cast<int>(neighbours(orbit).size()); }

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kOrbitOutOfRange: return "orbit out of range";
    case ViolationKind::kZeroSelfEdge: return "zero self-edge";
    case ViolationKind::kNonPrimitiveSelfEdge: return "non-primitive self-edge";
    case ViolationKind::kDegenerateTriangle: return "degenerate triangle";
    case ViolationKind::kMissingTriangleEdge: return "triangle edge missing";
    case ViolationKind::kEdgeTriangleCount: return "edge not in exactly 2 triangles";
    case ViolationKind::kInconsistentOrientation: return "inconsistent orientation";
    case ViolationKind::kLinkNotCycle: return "vertex link is not a single cycle";
    case ViolationKind::kEulerCharacteristic: return "euler characteristic is not 0";
    case ViolationKind::kDisconnected: return "quotient is disconnected";
    case ViolationKind::kCoverNotPlane: return "cover is not a plane";
    case ViolationKind::kBadAuxConstraint: return "bad aux constraint";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) os << to_string(v.kind) << ": " << v.detail << "\n";
  return os.str();
}

int euler_characteristic(const PeriodicComplex& c) {
  return c.n_orbits() - static_cast<int>(c.edges().size()) + static_cast<int>(c.triangles().size());
}

std::vector<Lift> vertex_link(const PeriodicComplex& c, int orbit) {
  std::map<Lift, Lift> next;
  for (const auto& t : c.triangles()) {
    for (int j = 0; j < 3; ++j) {
      if (t.corners[j].orbit != orbit) continue;
      const LatticeVector back = -t.corners[j].shift;
      const Lift x = t.corners[(j + 1) % 3].translated(back);
      const Lift y = t.corners[(j + 2) % 3].translated(back);
      if (!next.emplace(x, y).second) return {};
    }
  }
  if (next.size() < 3) return {};

  std::vector<Lift> cycle;
  Lift cur = next.begin()->first;
  for (std::size_t i = 0; i < next.size(); ++i) {
    cycle.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) return {};
    cur = it->second;
  }
  if (cur != cycle.front()) return {};
  std::set<Lift> seen(cycle.begin(), cycle.end());
  if (seen.size() != cycle.size()) return {};
  return cycle;
}

namespace {

bool in_range(const PeriodicComplex& c, int orbit) { return orbit >= 0 && orbit < c.n_orbits(); }

// Index of the subgroup of Z^2 generated by `gens` (0 when rank < 2).
std::int64_t generated_index(const std::vector<LatticeVector>& gens) {
  std::int64_t g = 0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      g = gcd(g, gens[i].m * gens[j].k - gens[i].k * gens[j].m);
      if (g == 1) return 1;
    }
  return g;
}

void check_cover(const PeriodicComplex& c, ValidationReport& report) {
  // Spanning-tree potentials; every non-tree edge closes a loop whose total
  // shift is the image of that loop under pi_1(K/L) -> L. The cover is the
  // plane exactly when this map is onto (then it is an isomorphism, the
  // quotient being a torus).
  const int n = c.n_orbits();
  std::vector<std::vector<std::pair<int, LatticeVector>>> adj(n);
  for (const auto& e : c.edges()) {
    adj[e.u].push_back({e.v, e.shift});
    adj[e.v].push_back({e.u, -e.shift});
  }
  std::vector<std::optional<LatticeVector>> pot(n);
  std::queue<int> queue;
  pot[0] = LatticeVector{};
  queue.push(0);
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    for (const auto& [y, s] : adj[x]) {
      if (pot[y]) continue;
      pot[y] = *pot[x] + s;
      queue.push(y);
    }
  }
  if (std::any_of(pot.begin(), pot.end(), [](const auto& p) { return !p.has_value(); })) {
    report.violations.push_back({ViolationKind::kDisconnected, "orbit graph has several components"});
    return;
  }
  std::vector<LatticeVector> loops;
  for (const auto& e : c.edges()) {
    const LatticeVector s = *pot[e.u] + e.shift - *pot[e.v];
    if (!s.is_zero()) loops.push_back(s);
  }
  const std::int64_t index = generated_index(loops);
  if (index != 1)
    report.violations.push_back(
        {ViolationKind::kCoverNotPlane, "loop shifts generate a subgroup of index " + std::to_string(index)});
}

}  // namespace

ValidationReport validate(const PeriodicComplex& c) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string d) { report.violations.push_back({k, std::move(d)}); };

  if (c.n_orbits() <= 0) {
    add(ViolationKind::kDisconnected, "no vertex orbits");
    return report;
  }

  bool ranges_ok = true;
  for (const auto& e : c.edges()) {
    if (!in_range(c, e.u) || !in_range(c, e.v)) {
      add(ViolationKind::kOrbitOutOfRange, "edge " + e.str());
      ranges_ok = false;
      continue;
    }
    if (e.is_self_edge()) {
      if (e.shift.is_zero())
        add(ViolationKind::kZeroSelfEdge, "edge " + e.str());
      else if (!is_primitive(e.shift))
        add(ViolationKind::kNonPrimitiveSelfEdge, "edge " + e.str());
    }
  }
  for (const auto& t : c.triangles())
    for (const auto& corner : t.corners)
      if (!in_range(c, corner.orbit)) {
        add(ViolationKind::kOrbitOutOfRange, "triangle " + t.str());
        ranges_ok = false;
      }
  for (const auto& e : c.aux_constraints()) {
    if (!in_range(c, e.u) || !in_range(c, e.v)) {
      add(ViolationKind::kBadAuxConstraint, "aux " + e.str() + " references a missing orbit");
    } else if (e.is_self_edge() && e.shift.is_zero()) {
      add(ViolationKind::kBadAuxConstraint, "aux " + e.str() + " has zero length by construction");
    } else if (c.has_edge(e)) {
      add(ViolationKind::kBadAuxConstraint, "aux " + e.str() + " duplicates a surface edge");
    }
  }
  if (!ranges_ok) return report;

  // Closed, oriented surface: each edge orbit is used exactly twice by the
  // triangle orbits, once in each direction.
  std::map<Edge, std::pair<int, int>> usage;  // edge -> (count, signed direction sum)
  for (const auto& e : c.edges()) usage[e] = {0, 0};
  for (const auto& t : c.triangles()) {
    if (t.corners[0] == t.corners[1] || t.corners[1] == t.corners[2] || t.corners[0] == t.corners[2]) {
      add(ViolationKind::kDegenerateTriangle, "triangle " + t.str());
      continue;
    }
    for (int j = 0; j < 3; ++j) {
      const Lift& from = t.corners[j];
      const Lift& to = t.corners[(j + 1) % 3];
      const Edge e = Edge::between(from, to);
      auto it = usage.find(e);
      if (it == usage.end()) {
        add(ViolationKind::kMissingTriangleEdge, "triangle " + t.str() + " uses " + e.str());
        continue;
      }
      const bool forward = (e.u == from.orbit && e.v == to.orbit && e.shift == to.shift - from.shift);
      it->second.first += 1;
      it->second.second += forward ? 1 : -1;
    }
  }
  for (const auto& [e, use] : usage) {
    if (use.first != 2)
      add(ViolationKind::kEdgeTriangleCount, "edge " + e.str() + " in " + std::to_string(use.first) + " triangle(s)");
    else if (use.second != 0)
      add(ViolationKind::kInconsistentOrientation, "edge " + e.str() + " used twice in the same direction");
  }

  for (int o = 0; o < c.n_orbits(); ++o) {
    const auto link = vertex_link(c, o);
    auto nb = c.neighbours(o);
    std::sort(nb.begin(), nb.end());
    auto sorted_link = link;
    std::sort(sorted_link.begin(), sorted_link.end());
    if (link.empty() || sorted_link != nb)
      add(ViolationKind::kLinkNotCycle, "orbit " + std::to_string(o));
  }

  const int chi = euler_characteristic(c);
  if (chi != 0) add(ViolationKind::kEulerCharacteristic, "chi = " + std::to_string(chi));

  check_cover(c, report);
  return report;
}

PeriodicComplex change_of_basis(const PeriodicComplex& c, const IntMatrix2& C) {
  const Sublattice sub(C);  // throws on singular C
  const auto& reps = sub.coset_representatives();
  const int index = static_cast<int>(sub.index());
  auto lift_of = [&](int orbit, LatticeVector s) {
    const auto red = sub.reduce(s);
    return Lift{orbit * index + static_cast<int>(red.coset), red.coords};
  };

  auto unfold_edges = [&](const std::vector<Edge>& list) {
    std::vector<Edge> out;
    out.reserve(list.size() * reps.size());
    for (const auto& e : list)
      for (std::size_t j = 0; j < reps.size(); ++j) {
        const Lift from{e.u * index + static_cast<int>(j), {}};
        out.push_back(Edge::between(from, lift_of(e.v, reps[j] + e.shift)));
      }
    return out;
  };

  std::vector<Triangle> tris;
  tris.reserve(c.triangles().size() * reps.size());
  for (const auto& t : c.triangles())
    for (const auto& r : reps) {
      std::array<Lift, 3> cs;
      for (int i = 0; i < 3; ++i) cs[i] = lift_of(t.corners[i].orbit, r + t.corners[i].shift);
      tris.push_back(Triangle::canonical(cs[0], cs[1], cs[2]));
    }

  return PeriodicComplex::make(c.n_orbits() * index, unfold_edges(c.edges()), std::move(tris),
                               unfold_edges(c.aux_constraints()));
}

bool is_special(const PeriodicComplex& c, int orbit) {
  return std::any_of(c.edges().begin(), c.edges().end(),
                     [&](const Edge& e) { return e.is_self_edge() && e.u == orbit; });
}

std::vector<int> special_orbits(const PeriodicComplex& c) {
  std::set<int> out;
  for (const auto& e : c.edges())
    if (e.is_self_edge()) out.insert(e.u);
  return {out.begin(), out.end()};
}

LiftPatch lift_patch(const PeriodicComplex& c, const CellRange& cells) {
  LiftPatch patch;
  if (cells.empty()) return patch;
  std::map<Lift, int> index;
  for (std::int64_t m = cells.m_begin; m < cells.m_end; ++m)
    for (std::int64_t k = cells.k_begin; k < cells.k_end; ++k)
      for (int o = 0; o < c.n_orbits(); ++o) {
        index[{o, {m, k}}] = static_cast<int>(patch.vertices.size());
        patch.vertices.push_back({o, {m, k}});
      }
  auto find = [&](const Lift& l) -> int {
    auto it = index.find(l);
    return it == index.end() ? -1 : it->second;
  };
  for (std::int64_t m = cells.m_begin; m < cells.m_end; ++m)
    for (std::int64_t k = cells.k_begin; k < cells.k_end; ++k) {
      const LatticeVector t{m, k};
      for (const auto& e : c.edges()) {
        const int a = find({e.u, t});
        const int b = find({e.v, t + e.shift});
        if (a >= 0 && b >= 0) patch.edges.push_back({a, b});
      }
      for (const auto& tri : c.triangles()) {
        std::array<int, 3> ids;
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
          ids[i] = find(tri.corners[i].translated(t));
          inside = ids[i] >= 0;
        }
        if (inside) patch.triangles.push_back(ids);
      }
    }
  return patch;
}

namespace {

PeriodicComplex reversed_orientation(const PeriodicComplex& c) {
  std::vector<Triangle> tris;
  for (const auto& t : c.triangles()) tris.push_back(t.reversed());
  return PeriodicComplex::make(c.n_orbits(), c.edges(), std::move(tris), c.aux_constraints());
}

// Try to extend orbit 0 of `a` -> (target, link rotation) to a full
// orientation-preserving isomorphism a -> b.
bool try_map(const PeriodicComplex& a, const PeriodicComplex& b, const std::vector<std::vector<Lift>>& links_a,
             const std::vector<std::vector<Lift>>& links_b, int target, std::size_t rotation) {
  const int n = a.n_orbits();
  std::vector<int> image(n, -1);
  std::vector<LatticeVector> offset(n);
  std::vector<std::size_t> rot(n, 0);
  std::vector<bool> used(n, false);

  auto position = [](const std::vector<Lift>& link, const Lift& l) -> std::optional<std::size_t> {
    auto it = std::find(link.begin(), link.end(), l);
    if (it == link.end()) return std::nullopt;
    return static_cast<std::size_t>(it - link.begin());
  };

  image[0] = target;
  used[target] = true;
  rot[0] = rotation;
  std::queue<int> queue;
  queue.push(0);
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    const auto& la = links_a[x];
    const auto& lb = links_b[image[x]];
    if (la.size() != lb.size()) return false;
    const std::size_t d = la.size();
    for (std::size_t j = 0; j < d; ++j) {
      const Lift& na = la[j];
      const Lift& nb = lb[(j + rot[x]) % d];
      const LatticeVector delta = nb.shift + offset[x] - na.shift;
      const int y = na.orbit;
      // Where x sits in the links of y and its image.
      const auto pa = position(links_a[y], Lift{x, -na.shift});
      const auto pb = position(links_b[nb.orbit], Lift{image[x], -nb.shift});
      if (!pa || !pb) return false;
      const std::size_t dy = links_a[y].size();
      if (links_b[nb.orbit].size() != dy) return false;
      const std::size_t r = (*pb + dy - *pa) % dy;
      if (image[y] < 0) {
        if (used[nb.orbit]) return false;
        image[y] = nb.orbit;
        used[nb.orbit] = true;
        offset[y] = delta;
        rot[y] = r;
        queue.push(y);
      } else if (image[y] != nb.orbit || offset[y] != delta || rot[y] != r) {
        return false;
      }
    }
  }
  if (std::find(image.begin(), image.end(), -1) != image.end()) return false;

  auto map_lift = [&](const Lift& l) { return Lift{image[l.orbit], l.shift + offset[l.orbit]}; };
  auto map_edges = [&](const std::vector<Edge>& list) {
    std::vector<Edge> out;
    for (const auto& e : list) out.push_back(Edge::between(map_lift({e.u, {}}), map_lift({e.v, e.shift})));
    std::sort(out.begin(), out.end());
    return out;
  };
  if (map_edges(a.edges()) != b.edges()) return false;
  if (map_edges(a.aux_constraints()) != b.aux_constraints()) return false;
  std::vector<Triangle> tris;
  for (const auto& t : a.triangles())
    tris.push_back(Triangle::canonical(map_lift(t.corners[0]), map_lift(t.corners[1]), map_lift(t.corners[2])));
  std::sort(tris.begin(), tris.end());
  return tris == b.triangles();
}

bool isomorphic_oriented(const PeriodicComplex& a, const PeriodicComplex& b) {
  std::vector<std::vector<Lift>> la(a.n_orbits()), lb(b.n_orbits());
  for (int o = 0; o < a.n_orbits(); ++o) {
    la[o] = vertex_link(a, o);
    if (la[o].empty()) return false;
  }
  for (int o = 0; o < b.n_orbits(); ++o) {
    lb[o] = vertex_link(b, o);
    if (lb[o].empty()) return false;
  }
  for (int target = 0; target < b.n_orbits(); ++target) {
    if (lb[target].size() != la[0].size()) continue;
    for (std::size_t r = 0; r < lb[target].size(); ++r)
      if (try_map(a, b, la, lb, target, r)) return true;
  }
  return false;
}

}  // namespace

bool isomorphic(const PeriodicComplex& a, const PeriodicComplex& b) {
  if (a.n_orbits() != b.n_orbits() || a.edges().size() != b.edges().size() ||
      a.triangles().size() != b.triangles().size() || a.aux_constraints().size() != b.aux_constraints().size())
    return false;
  if (a.n_orbits() == 0) return true;
  if (a == b) return true;
  return isomorphic_oriented(a, b) || isomorphic_oriented(a, reversed_orientation(b));
}

}  // namespace flexlat
