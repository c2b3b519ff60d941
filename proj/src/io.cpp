#include "flexlat/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace flexlat {

using nlohmann::json;

namespace {

json lattice_json(const Edge& e) { return json::array({e.u, e.v, e.shift.m, e.shift.k}); }

Edge edge_from_json(const json& j, int n) {
  if (!j.is_array() || j.size() != 4) throw FormatError("edge must be [u, v, m, k]");
  const int u = j[0].get<int>();
  const int v = j[1].get<int>();
  if (u < 0 || v < 0 || u >= n || v >= n) throw FormatError("edge orbit out of range: " + j.dump());
  return Edge::canonical(u, v, {j[2].get<std::int64_t>(), j[3].get<std::int64_t>()});
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("point must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json lift_json(const Lift& l) { return json::array({l.orbit, l.shift.m, l.shift.k}); }

}  // namespace

json to_json(const PeriodicComplex& c) {
  json j;
  j["version"] = 1;
  j["n_orbits"] = c.n_orbits();
  j["edges"] = json::array();
  for (const auto& e : c.edges()) j["edges"].push_back(lattice_json(e));
  j["triangles"] = json::array();
  for (const auto& t : c.triangles()) {
    json row = json::array();
    for (const auto& corner : t.corners) {
      row.push_back(corner.orbit);
      row.push_back(corner.shift.m);
      row.push_back(corner.shift.k);
    }
    j["triangles"].push_back(row);
  }
  j["aux"] = json::array();
  for (const auto& e : c.aux_constraints()) j["aux"].push_back(lattice_json(e));
  return j;
}

PeriodicComplex complex_from_json(const json& j) {
  try {
    if (!j.is_object()) throw FormatError("complex must be a JSON object");
    if (j.value("version", 0) != 1) throw FormatError("unsupported version (expected 1)");
    const int n = j.at("n_orbits").get<int>();
    if (n <= 0) throw FormatError("n_orbits must be positive");
    std::vector<Edge> edges, aux;
    std::vector<Triangle> tris;
    for (const auto& e : j.at("edges")) edges.push_back(edge_from_json(e, n));
    for (const auto& t : j.at("triangles")) {
      if (!t.is_array() || t.size() != 9) throw FormatError("triangle must have 9 integers");
      std::array<Lift, 3> c;
      for (int i = 0; i < 3; ++i) {
        c[i] = {t[3 * i].get<int>(), {t[3 * i + 1].get<std::int64_t>(), t[3 * i + 2].get<std::int64_t>()}};
        if (c[i].orbit < 0 || c[i].orbit >= n) throw FormatError("triangle orbit out of range: " + t.dump());
      }
      tris.push_back(Triangle::canonical(c[0], c[1], c[2]));
    }
    if (j.contains("aux"))
      for (const auto& e : j.at("aux")) aux.push_back(edge_from_json(e, n));
    return PeriodicComplex::make(n, std::move(edges), std::move(tris), std::move(aux));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed complex: ") + e.what());
  }
}

json to_json(const Realization& r) {
  json j;
  j["positions"] = json::array();
  for (const auto& p : r.positions) j["positions"].push_back(vec_json(p));
  j["a"] = vec_json(r.a);
  j["b"] = vec_json(r.b);
  return j;
}

Realization realization_from_json(const json& j, int n_orbits) {
  try {
    Realization r;
    for (const auto& p : j.at("positions")) r.positions.push_back(vec_from_json(p));
    if (static_cast<int>(r.positions.size()) != n_orbits)
      throw FormatError("realization has " + std::to_string(r.positions.size()) + " positions for " +
                        std::to_string(n_orbits) + " orbits");
    r.a = vec_from_json(j.at("a"));
    r.b = vec_from_json(j.at("b"));
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed realization: ") + e.what());
  }
}

json to_json(const SurfaceDocument& doc) {
  json j = to_json(doc.complex);
  if (doc.realization) j["realization"] = to_json(*doc.realization);
  if (doc.lengths) {
    j["lengths"] = json::array();
    for (const auto& [e, len] : *doc.lengths) {
      json row = lattice_json(e);
      row.push_back(len);
      j["lengths"].push_back(row);
    }
  }
  return j;
}

SurfaceDocument document_from_json(const json& j) {
  SurfaceDocument doc;
  doc.complex = complex_from_json(j);
  if (j.contains("realization")) doc.realization = realization_from_json(j.at("realization"), doc.complex.n_orbits());
  if (j.contains("lengths")) {
    try {
      EdgeLengths lengths;
      for (const auto& row : j.at("lengths")) {
        if (!row.is_array() || row.size() != 5) throw FormatError("length entry must be [u, v, m, k, l]");
        const double l = row[4].get<double>();
        if (!(l > 0.0)) throw FormatError("squared lengths must be positive");
        lengths[edge_from_json(json::array({row[0], row[1], row[2], row[3]}), doc.complex.n_orbits())] = l;
      }
      doc.lengths = std::move(lengths);
    } catch (const json::exception& e) {
      throw FormatError(std::string("malformed lengths: ") + e.what());
    }
  }
  return doc;
}

std::string write_document(const SurfaceDocument& doc) { return to_json(doc).dump(2) + "\n"; }

SurfaceDocument read_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  return document_from_json(j);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string path_to_csv(const FlexPath& path, bool with_coords) {
  std::ostringstream os;
  os << "t,g11,g12,g22,residual_norm";
  const Eigen::Index n = path.samples.empty() ? 0 : path.samples.front().q.size();
  if (with_coords)
    for (Eigen::Index i = 0; i < n; ++i) os << ",q" << i;
  os << "\n";
  for (const auto& s : path.samples) {
    os << format_double(s.t) << ',' << format_double(s.g.g11) << ',' << format_double(s.g.g12) << ','
       << format_double(s.g.g22) << ',' << format_double(s.residual_norm);
    if (with_coords)
      for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(s.q.coords[i]);
    os << "\n";
  }
  return os.str();
}

std::vector<TraceRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,g11,g12,g22,residual_norm", 0) != 0)
    throw FormatError("trace CSV must start with the header t,g11,g12,g22,residual_norm");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[5];
    for (double& x : v) {
      if (!std::getline(ls, cell, ',')) throw FormatError("line " + std::to_string(lineno) + ": too few columns");
      try {
        std::size_t used = 0;
        x = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(lineno) + ": not a number: " + cell);
      }
    }
    rows.push_back({v[0], {v[1], v[2], v[3]}, v[4]});
  }
  return rows;
}

json to_json(const PolyRelation& rel) {
  json j;
  j["degree"] = rel.degree;
  j["order"] = kMonomialOrder;
  j["coefficients"] = std::vector<double>(rel.coeffs.data(), rel.coeffs.data() + rel.coeffs.size());
  return j;
}

json to_json(const BaseCaseStructure& s) {
  json j;
  j["lambda"] = {s.lambda.m, s.lambda.k};
  j["mu"] = {s.mu.m, s.mu.k};
  j["q"] = s.q();
  j["order"] = s.order;
  j["chain"] = json::array();
  for (const auto& l : s.chain) j["chain"].push_back(lift_json(l));
  return j;
}

json to_json(const ReductionTrace& trace) {
  json j;
  j["moves"] = json::array();
  for (const auto& m : trace.moves) {
    json mv;
    mv["measure"] = {m.before.first, m.before.second};
    if (m.kind == ReductionMove::Kind::kCollapse) {
      mv["kind"] = "collapse";
      json w = json::array();
      for (const auto& c : m.witness.corners) w.push_back(lift_json(c));
      mv["witness"] = w;
      mv["removed"] = m.removed;
    } else {
      mv["kind"] = "flip";
      mv["vertex"] = m.vertex;
      mv["diagonal"] = m.diagonal;
    }
    j["moves"].push_back(mv);
  }
  j["final_measure"] = {trace.final_measure.first, trace.final_measure.second};
  j["final_complex"] = to_json(trace.final_complex);
  j["orbit_map"] = trace.orbit_map;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace flexlat
