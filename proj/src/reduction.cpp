#include "flexlat/reduction.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <queue>
#include <set>

namespace flexlat {

namespace {

LatticeVector positive(LatticeVector s) { return s.lex_positive() ? s : -s; }

std::vector<Lift> link_of(const PeriodicComplex& c, const Lift& v) {
  std::vector<Lift> link = vertex_link(c, v.orbit);
  for (auto& x : link) x = x.translated(v.shift);
  return link;
}

std::int64_t chebyshev(LatticeVector s) { return std::max(std::abs(s.m), std::abs(s.k)); }

}  // namespace

std::optional<LatticeVector> common_special_shift(const PeriodicComplex& c) {
  std::map<int, std::set<LatticeVector>> shifts;
  for (const auto& e : c.edges())
    if (e.is_self_edge()) shifts[e.u].insert(positive(e.shift));
  if (shifts.empty()) return std::nullopt;

  std::set<LatticeVector> common = shifts.begin()->second;
  for (const auto& [orbit, s] : shifts) {
    std::set<LatticeVector> keep;
    std::set_intersection(common.begin(), common.end(), s.begin(), s.end(), std::inserter(keep, keep.begin()));
    common = std::move(keep);
  }
  if (common.empty()) throw ReductionError("special orbits have no common self-edge shift");
  return *common.begin();
}

BaseCaseStructure base_case_structure(const PeriodicComplex& c) {
  const int n = c.n_orbits();
  if (static_cast<int>(special_orbits(c).size()) != n)
    throw ReductionError("base case needs every orbit to be special");
  const LatticeVector lambda = *common_special_shift(c);

  BaseCaseStructure s;
  s.lambda = lambda;
  Lift v{0, {0, 0}};
  std::set<int> seen;
  for (int step = 0;; ++step) {
    if (step >= n) throw ReductionError("cylinder chain does not close");
    seen.insert(v.orbit);
    s.chain.push_back(v);
    s.order.push_back(v.orbit);

    const std::vector<Lift> link = link_of(c, v);
    if (link.size() != 6)
      throw ReductionError("orbit " + std::to_string(v.orbit) + " has degree " + std::to_string(link.size()) +
                           ", expected 6");
    const Lift fwd = v.translated(lambda);
    const Lift back = v.translated(-lambda);
    const auto it = std::find(link.begin(), link.end(), fwd);
    if (it == link.end()) throw ReductionError("T_lambda(v) is not a neighbour of v");
    const std::size_t p = static_cast<std::size_t>(it - link.begin());
    const Lift w = link[(p + 1) % 6];
    if (link[(p + 2) % 6] != w.translated(-lambda) || link[(p + 3) % 6] != back)
      throw ReductionError("link of orbit " + std::to_string(v.orbit) + " does not have the cylinder pattern");
    if (!c.has_triangle(Triangle::canonical(v, fwd, w)) ||
        !c.has_triangle(Triangle::canonical(fwd, w.translated(lambda), w)))
      throw ReductionError("missing cylinder triangle");

    s.cylinders.push_back({Edge::between(v, fwd), Edge::between(v, w), Edge::between(fwd, w)});
    if (w.orbit == s.chain.front().orbit) {
      s.chain.push_back(w);
      s.mu = w.shift - s.chain.front().shift;
      break;
    }
    if (seen.count(w.orbit)) throw ReductionError("cylinder chain revisits an orbit");
    v = w;
  }

  if (s.q() != n) throw ReductionError("cylinder chain misses orbits");
  const std::int64_t det = lambda.m * s.mu.k - lambda.k * s.mu.m;
  if (std::abs(det) != 1) throw ReductionError("lambda, mu is not a lattice basis");
  if (static_cast<int>(c.edges().size()) != 3 * n || static_cast<int>(c.triangles().size()) != 2 * n)
    throw ReductionError("base case must have 3q edges and 2q triangles");
  return s;
}

BasisInnerProducts basis_inner_products(const BaseCaseStructure& s, const EdgeLengths& lengths) {
  auto len = [&](const Edge& e) {
    auto it = lengths.find(e);
    if (it == lengths.end()) throw std::out_of_range("no length for edge " + e.str());
    return it->second;
  };
  BasisInnerProducts out;
  if (s.cylinders.empty()) return out;
  out.lambda_lambda = len(s.cylinders.front().along);
  for (const auto& cyl : s.cylinders) out.lambda_mu += 0.5 * (len(cyl.along) + len(cyl.rung) - len(cyl.diagonal));
  return out;
}

std::vector<EmptyTriangle> find_empty_triangles(const PeriodicComplex& c) {
  std::set<EmptyTriangle> found;
  for (int u = 0; u < c.n_orbits(); ++u) {
    const Lift base{u, {0, 0}};
    const std::vector<Lift> nb = c.neighbours(u);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (nb[i] == nb[j] || !c.has_edge(Edge::between(nb[i], nb[j]))) continue;
        const Triangle t = Triangle::canonical(base, nb[i], nb[j]);
        if (c.has_unoriented_triangle(t)) continue;
        found.insert(std::min(t, t.reversed()));
      }
  }
  return {found.begin(), found.end()};
}

std::optional<EmptyTriangle> find_empty_triangle(const PeriodicComplex& c) {
  auto all = find_empty_triangles(c);
  if (all.empty()) return std::nullopt;
  return all.front();
}

namespace {

// Third corner of the triangle lying to the left of the directed edge
// from -> to, for lifts anywhere in the cover.
class LeftTriangles {
 public:
  explicit LeftTriangles(const PeriodicComplex& c) {
    for (const auto& t : c.triangles())
      for (int r = 0; r < 3; ++r) {
        const Lift& x = t.corners[r];
        const Lift& y = t.corners[(r + 1) % 3];
        const Lift& z = t.corners[(r + 2) % 3];
        table_[{x.orbit, y.orbit, y.shift - x.shift}] = Lift{z.orbit, z.shift - x.shift};
      }
  }

  std::optional<Lift> third(const Lift& from, const Lift& to) const {
    auto it = table_.find({from.orbit, to.orbit, to.shift - from.shift});
    if (it == table_.end()) return std::nullopt;
    return it->second.translated(from.shift);
  }

 private:
  std::map<std::tuple<int, int, LatticeVector>, Lift> table_;
};

using LiftedTriangle = std::array<Lift, 3>;

LiftedTriangle rotate_least_first(LiftedTriangle t) {
  const auto it = std::min_element(t.begin(), t.end());
  std::rotate(t.begin(), it, t.end());
  return t;
}

std::pair<Lift, Lift> undirected(const Lift& a, const Lift& b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

// Triangles reachable from `start` without crossing the witness edges and
// without leaving the box of the given radius; nullopt when the box is left.
std::optional<std::set<LiftedTriangle>> flood(const LeftTriangles& left, const LiftedTriangle& start,
                                              const std::set<std::pair<Lift, Lift>>& walls, std::int64_t radius) {
  std::set<LiftedTriangle> seen{rotate_least_first(start)};
  std::queue<LiftedTriangle> queue;
  queue.push(start);
  while (!queue.empty()) {
    const LiftedTriangle t = queue.front();
    queue.pop();
    for (const auto& corner : t)
      if (chebyshev(corner.shift) > radius) return std::nullopt;
    for (int r = 0; r < 3; ++r) {
      const Lift& x = t[r];
      const Lift& y = t[(r + 1) % 3];
      if (walls.count(undirected(x, y))) continue;
      const auto z = left.third(y, x);
      if (!z) throw ReductionError("edge without a triangle on one side");
      const LiftedTriangle next{y, x, *z};
      if (seen.insert(rotate_least_first(next)).second) queue.push(next);
    }
  }
  return seen;
}

}  // namespace

PeriodicComplex collapse_empty_triangle(const PeriodicComplex& c, const EmptyTriangle& witness,
                                        std::vector<int>* orbit_map) {
  const auto& w = witness.corners;
  for (const auto& e : witness.edges())
    if (!c.has_edge(e)) throw std::invalid_argument("stale witness: edge " + e.str() + " is missing");
  if (c.has_unoriented_triangle(witness)) throw std::invalid_argument("stale witness: it bounds a triangle");

  const LeftTriangles left(c);
  const std::set<std::pair<Lift, Lift>> walls{undirected(w[0], w[1]), undirected(w[1], w[2]),
                                              undirected(w[2], w[0])};
  const auto third_ab = left.third(w[0], w[1]);
  const auto third_ba = left.third(w[1], w[0]);
  if (!third_ab || !third_ba) throw ReductionError("witness edge is not a surface edge");

  std::int64_t base = 0;
  for (const auto& corner : w) base = std::max(base, chebyshev(corner.shift));

  std::optional<std::set<LiftedTriangle>> disk;
  bool disk_left_of_ab = true;
  for (std::int64_t radius = 1; radius <= 64 && !disk; radius *= 2) {
    disk = flood(left, {w[0], w[1], *third_ab}, walls, base + radius);
    if (disk) break;
    disk = flood(left, {w[1], w[0], *third_ba}, walls, base + radius);
    disk_left_of_ab = false;
  }
  if (!disk) throw ReductionError("disk bounded by " + witness.str() + " not found within 64 cells");

  const std::set<Lift> boundary(w.begin(), w.end());
  std::set<int> removed;
  std::set<Edge> dead_edges;
  std::set<Triangle> dead_triangles;
  for (const auto& t : *disk) {
    dead_triangles.insert(Triangle::canonical(t[0], t[1], t[2]));
    for (int r = 0; r < 3; ++r) {
      if (!boundary.count(t[r])) removed.insert(t[r].orbit);
      if (!walls.count(undirected(t[r], t[(r + 1) % 3]))) dead_edges.insert(Edge::between(t[r], t[(r + 1) % 3]));
    }
  }
  for (const auto& corner : w)
    if (removed.count(corner.orbit)) throw ReductionError("disk interior meets a translate of its boundary");

  std::vector<int> new_id(c.n_orbits(), -1);
  std::vector<int> old_id;
  for (int o = 0; o < c.n_orbits(); ++o)
    if (!removed.count(o)) {
      new_id[o] = static_cast<int>(old_id.size());
      old_id.push_back(o);
    }
  auto relabel = [&](const Lift& l) { return Lift{new_id[l.orbit], l.shift}; };
  auto keep_edge = [&](const Edge& e) { return new_id[e.u] >= 0 && new_id[e.v] >= 0; };

  std::vector<Edge> edges;
  for (const auto& e : c.edges())
    if (!dead_edges.count(e) && keep_edge(e)) edges.push_back(Edge::canonical(new_id[e.u], new_id[e.v], e.shift));
  std::vector<Edge> aux;
  for (const auto& e : c.aux_constraints())
    if (keep_edge(e)) aux.push_back(Edge::canonical(new_id[e.u], new_id[e.v], e.shift));
  std::vector<Triangle> tris;
  for (const auto& t : c.triangles()) {
    if (dead_triangles.count(t)) continue;
    tris.push_back(Triangle::canonical(relabel(t.corners[0]), relabel(t.corners[1]), relabel(t.corners[2])));
  }
  if (disk_left_of_ab)
    tris.push_back(Triangle::canonical(relabel(w[0]), relabel(w[1]), relabel(w[2])));
  else
    tris.push_back(Triangle::canonical(relabel(w[1]), relabel(w[0]), relabel(w[2])));

  if (orbit_map) *orbit_map = old_id;
  return PeriodicComplex::make(static_cast<int>(old_id.size()), std::move(edges), std::move(tris), std::move(aux));
}

namespace {

// Empty string when flipping at link index i is allowed, else the reason.
std::string flip_obstruction(const PeriodicComplex& c, int u, const std::vector<Lift>& link, int i) {
  const int d = static_cast<int>(link.size());
  if (d < 4) return "degree " + std::to_string(d) + " is below 4";
  if (i < 0 || i >= d) return "diagonal index out of range";
  const Lift& a = link[i];
  const Lift& b = link[(i + 1) % d];
  const Lift& e = link[(i + 2) % d];
  const Edge diag = Edge::between(a, e);
  if (diag.is_self_edge() && !is_primitive(diag.shift)) return "diagonal " + diag.str() + " is not primitive";
  if (c.has_edge(diag)) return "diagonal " + diag.str() + " is already an edge";
  if (c.degree(b.orbit) < 4) return "opposite vertex has degree below 4";
  (void)u;
  return {};
}

}  // namespace

PeriodicComplex flip(const PeriodicComplex& c, int u, int i) {
  if (u < 0 || u >= c.n_orbits()) throw std::invalid_argument("orbit out of range");
  if (is_special(c, u)) throw std::invalid_argument("flip at a special orbit");
  const std::vector<Lift> link = vertex_link(c, u);
  if (link.empty()) throw std::invalid_argument("link of orbit " + std::to_string(u) + " is not a cycle");
  if (const std::string why = flip_obstruction(c, u, link, i); !why.empty()) throw std::invalid_argument(why);

  const int d = static_cast<int>(link.size());
  const Lift base{u, {0, 0}};
  const Lift& a = link[i];
  const Lift& b = link[(i + 1) % d];
  const Lift& e = link[(i + 2) % d];

  const Edge gone = Edge::between(base, b);
  const Triangle t1 = Triangle::canonical(base, a, b);
  const Triangle t2 = Triangle::canonical(base, b, e);
  std::vector<Edge> edges;
  for (const auto& x : c.edges())
    if (x != gone) edges.push_back(x);
  const Edge added = Edge::between(a, e);
  edges.push_back(added);
  std::vector<Triangle> tris;
  for (const auto& t : c.triangles())
    if (t != t1 && t != t2) tris.push_back(t);
  tris.push_back(Triangle::canonical(base, a, e));
  tris.push_back(Triangle::canonical(a, b, e));
  // An aux constraint on the new diagonal is now a surface edge.
  std::vector<Edge> aux;
  for (const auto& x : c.aux_constraints())
    if (x != added) aux.push_back(x);
  return PeriodicComplex::make(c.n_orbits(), std::move(edges), std::move(tris), std::move(aux));
}

std::vector<int> valid_diagonals(const PeriodicComplex& c, int u) {
  std::vector<int> out;
  if (is_special(c, u)) return out;
  const std::vector<Lift> link = vertex_link(c, u);
  for (int i = 0; i < static_cast<int>(link.size()); ++i)
    if (flip_obstruction(c, u, link, i).empty()) out.push_back(i);
  return out;
}

Measure reduction_measure(const PeriodicComplex& c) {
  int count = 0;
  int least = 0;
  for (int o = 0; o < c.n_orbits(); ++o) {
    if (is_special(c, o)) continue;
    const int d = c.degree(o);
    least = count == 0 ? d : std::min(least, d);
    ++count;
  }
  return {count, least};
}

ReductionTrace reduce(const PeriodicComplex& c, DiagonalStrategy strategy) {
  ReductionTrace trace;
  trace.final_complex = c;
  trace.orbit_map.resize(c.n_orbits());
  for (int o = 0; o < c.n_orbits(); ++o) trace.orbit_map[o] = o;

  const std::size_t budget = 10 * (static_cast<std::size_t>(c.n_orbits()) + c.edges().size());
  PeriodicComplex& cur = trace.final_complex;
  Measure measure = reduction_measure(cur);
  while (measure.first > 0) {
    if (trace.moves.size() >= budget) throw ReductionError("reduction exceeded its move budget");
    ReductionMove move;
    move.before = measure;
    PeriodicComplex next;

    if (auto witness = find_empty_triangle(cur)) {
      std::vector<int> kept;
      next = collapse_empty_triangle(cur, *witness, &kept);
      move.kind = ReductionMove::Kind::kCollapse;
      move.witness = *witness;
      std::vector<int> new_map;
      std::set<int> alive(kept.begin(), kept.end());
      for (int o = 0; o < cur.n_orbits(); ++o)
        if (!alive.count(o)) move.removed.push_back(trace.orbit_map[o]);
      for (int o : kept) new_map.push_back(trace.orbit_map[o]);
      trace.orbit_map = std::move(new_map);
    } else {
      move.kind = ReductionMove::Kind::kFlip;
      for (int o = 0; o < cur.n_orbits() && move.vertex < 0; ++o) {
        if (is_special(cur, o) || cur.degree(o) != measure.second) continue;
        const std::vector<int> options = valid_diagonals(cur, o);
        if (options.empty()) continue;
        const int i = strategy == DiagonalStrategy::kFirstValid ? options.front() : options.back();
        next = flip(cur, o, i);
        move.vertex = trace.orbit_map[o];
        move.diagonal = i;
      }
      if (move.vertex < 0) throw ReductionError("no flippable diagonal at a minimal-degree non-special orbit");
    }

    const ValidationReport report = validate(next);
    if (!report.ok()) throw ReductionError("move produced an invalid complex: " + report.summary());
    const Measure after = reduction_measure(next);
    if (!(after < measure)) throw ReductionError("reduction measure did not decrease");
    trace.moves.push_back(std::move(move));
    cur = std::move(next);
    measure = after;
  }
  trace.final_measure = measure;
  return trace;
}

}  // namespace flexlat
