#include "flexlat/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "flexlat/builders.hpp"
#include "flexlat/io.hpp"

namespace flexlat::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionAlarm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError(what + ": not a number: '" + cell + "'");
    }
  }
  if (out.size() != count) throw InputError(what + " needs " + std::to_string(count) + " comma-separated values");
  return out;
}

Vec3 parse_vec(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, 3, what);
  return {v[0], v[1], v[2]};
}

IntMatrix2 parse_sublattice(const std::string& text) {
  const auto v = parse_numbers(text, 4, "--sublattice");
  std::array<std::int64_t, 4> n{};
  for (int i = 0; i < 4; ++i) {
    n[i] = static_cast<std::int64_t>(v[i]);
    if (static_cast<double>(n[i]) != v[i]) throw InputError("--sublattice entries must be integers");
  }
  const IntMatrix2 C = IntMatrix2::from_rows(n[0], n[1], n[2], n[3]);
  if (C.det() == 0) throw InputError("--sublattice is singular");
  return C;
}

FoldFamily parse_family(const std::string& s) {
  if (s == "a") return FoldFamily::kParallelA;
  if (s == "b") return FoldFamily::kParallelB;
  if (s == "a-b") return FoldFamily::kParallelAMinusB;
  throw InputError("unknown fold family '" + s + "' (a, b or a-b)");
}

json settings_json(const SolverSettings& s) {
  return {{"rank_tolerance", s.rank_tolerance},
          {"corrector_tolerance", s.corrector_tolerance},
          {"step_size", s.step_size},
          {"max_corrector_iterations", s.max_corrector_iterations}};
}

json manifest(const std::string& command, const std::vector<std::string>& args,
              const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  json j;
  j["tool"] = "flexlat";
  j["version"] = kVersion;
  j["command"] = command;
  j["args"] = args;
  j["inputs"] = json::array();
  for (const auto& p : inputs) j["inputs"].push_back({{"path", p}, {"fnv1a64", hex64(fnv1a64(read_file(p)))}});
  j["outputs"] = outputs;
  return j;
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

SurfaceDocument load_document(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  return read_document(text);
}

void require_valid(const PeriodicComplex& c) {
  const ValidationReport report = validate(c);
  if (!report.ok())
    throw InputError("invalid complex: " + to_string(report.violations.front().kind) + ": " +
                     report.violations.front().detail);
}

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FLEXLAT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<unsigned>(v);
  }
  return cap;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string gram_svg(const GramCloud& cloud) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                  "#17becf"};
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!cloud.empty()) {
    x0 = x1 = cloud.points[0].g.g11;
    y0 = y1 = cloud.points[0].g.g22;
    for (const auto& p : cloud.points) {
      x0 = std::min(x0, p.g.g11), x1 = std::max(x1, p.g.g11);
      y0 = std::min(y0, p.g.g22), y1 = std::max(y1, p.g.g22);
    }
  }
  const double pad_x = std::max(1e-9, 0.05 * (x1 - x0)), pad_y = std::max(1e-9, 0.05 * (y1 - y0));
  x0 -= pad_x, x1 += pad_x, y0 -= pad_y, y1 += pad_y;
  const double W = 480, H = 480, M = 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * M << "\" height=\"" << H + 2 * M
     << "\">\n<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << M + W / 2 << "\" y=\"" << H + 2 * M - 10 << "\" text-anchor=\"middle\">g11</text>\n";
  os << "<text x=\"12\" y=\"" << M + H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 12 " << M + H / 2
     << ")\">g22</text>\n";
  char buf[160];
  for (const auto& p : cloud.points) {
    const double x = M + W * (p.g.g11 - x0) / (x1 - x0);
    const double y = M + H * (1.0 - (p.g.g22 - y0) / (y1 - y0));
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"%s\"/>\n", x, y,
                  palette[static_cast<std::size_t>(p.path) % 8]);
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

struct BuildOptions {
  std::string example;
  std::string a = "1,0,0";
  std::string b = "0,1,0";
  std::string sublattice = "1,0,0,1";
  double side = 1.0;
  std::optional<double> fold_angle;
  std::string fold_family = "a";
  double alpha = std::numbers::pi / 3;
  double a0 = 2.0;
  double b0 = 2.0;
  double z = 0.3;
  std::optional<int> star;
  std::string out = ".";
};

int cmd_build(const BuildOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  SurfaceDocument doc;
  try {
    if (o.example == "plane" || o.example == "grid") {
      const IntMatrix2 C = parse_sublattice(o.sublattice);
      const PlaneModel model = o.example == "plane" ? triangulated_plane(parse_vec(o.a, "--a"), parse_vec(o.b, "--b"), C)
                                                    : grid_squares(o.side, C);
      doc.complex = model.complex;
      doc.realization = o.fold_angle ? folded_plane_realization(model, *o.fold_angle, parse_family(o.fold_family))
                                     : model.flat;
    } else if (o.example == "miura") {
      const MiuraModel model = miura_ori({o.alpha, o.a0, o.b0, o.z});
      doc.complex = model.complex;
      doc.realization = model.realization;
    } else {
      throw InputError("unknown example '" + o.example + "' (plane, grid or miura)");
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (o.star) {
    const auto& tris = doc.complex.triangles();
    if (*o.star < 0 || *o.star >= static_cast<int>(tris.size()))
      throw InputError("--star index out of range (0.." + std::to_string(tris.size() - 1) + ")");
    const Triangle t = tris[static_cast<std::size_t>(*o.star)];
    doc.realization = star_subdivide_realization(*doc.realization, t);
    doc.complex = star_subdivide(doc.complex, t);
  }

  const std::string surface = out_path(o.out, "surface.json");
  const std::string man = out_path(o.out, "manifest.json");
  write_file_atomic(surface, write_document(doc));
  json m = manifest("build", args, {}, {surface});
  m["example"] = o.example;
  m["surface_fnv1a64"] = hex64(fnv1a64(read_file(surface)));
  write_file_atomic(man, m.dump(2) + "\n");
  out << surface << "\n";
  return kOk;
}

int cmd_validate(const std::string& input, std::ostream& out) {
  const SurfaceDocument doc = load_document(input);
  const ValidationReport report = validate(doc.complex);
  if (!report.ok()) throw InputError(report.summary());
  out << "valid: " << doc.complex.n_orbits() << " orbits, " << doc.complex.edges().size() << " edges, "
      << doc.complex.triangles().size() << " triangles, " << doc.complex.aux_constraints().size()
      << " aux; special orbits " << special_orbits(doc.complex).size() << "\n";
  return kOk;
}

struct TraceOptions {
  std::string input;
  int steps = 50;
  SolverSettings settings;
  std::optional<int> seed_branch;
  bool coords = false;
  std::string out = ".";
};

int cmd_trace(const TraceOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  if (!o.settings.valid()) throw InputError("solver settings must be positive");
  if (o.steps < 0) throw InputError("--steps must be non-negative");
  const SurfaceDocument doc = load_document(o.input);
  require_valid(doc.complex);
  if (!doc.realization) throw InputError("input has no realization");
  const EdgeLengths target = doc.lengths ? *doc.lengths : all_edge_lengths(doc.complex, *doc.realization);

  Configuration q0;
  try {
    q0 = Configuration::from_realization(*doc.realization);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  int corrector_iterations = 0;
  q0 = project_newton(doc.complex, q0, target, o.settings, &corrector_iterations);

  const FlexSpace space = infinitesimal_flex_space(constraint_jacobian(doc.complex, q0), o.settings);
  std::vector<int> branches;
  if (o.seed_branch) {
    if (*o.seed_branch < 0 || *o.seed_branch >= space.dimension)
      throw InputError("--seed-branch " + std::to_string(*o.seed_branch) + " outside flex dimension " +
                       std::to_string(space.dimension));
    branches.push_back(*o.seed_branch);
  } else {
    for (int j = 0; j < space.dimension; ++j) branches.push_back(j);
  }

  struct Job {
    int branch;
    int sign;
    FlexPath path;
  };
  std::vector<Job> jobs;
  for (int j : branches)
    for (int sign : {1, -1}) jobs.push_back({j, sign, {}});
  parallel_for(jobs.size(), [&](std::size_t i) {
    jobs[i].path = trace_flex(doc.complex, q0, jobs[i].sign * space.basis.col(jobs[i].branch), o.steps, target,
                              o.settings);
  });

  std::vector<std::string> outputs;
  json summary = json::array();
  for (const auto& job : jobs) {
    const std::string name =
        "branch_" + std::to_string(job.branch) + "_" + (job.sign > 0 ? "plus" : "minus") + ".csv";
    const std::string path = out_path(o.out, name);
    write_file_atomic(path, path_to_csv(job.path, o.coords));
    outputs.push_back(path);
    summary.push_back({{"file", name},
                       {"samples", job.path.samples.size()},
                       {"stop", to_string(job.path.stop)}});
  }
  json m = manifest("trace", args, {o.input}, outputs);
  m["settings"] = settings_json(o.settings);
  m["steps"] = o.steps;
  m["flex_dimension"] = space.dimension;
  m["gram_tangent_rank"] = gram_tangent_rank(doc.complex, q0, o.settings);
  m["start_corrector_iterations"] = corrector_iterations;
  m["branches"] = summary;
  write_file_atomic(out_path(o.out, "manifest.json"), m.dump(2) + "\n");
  out << "flex dimension " << space.dimension << ", " << jobs.size() << " paths\n";
  return kOk;
}

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  int degree = 2;
  double svd_threshold = 1e-7;
  std::optional<double> radius;
  double dimension_tolerance = kDefaultDimensionTolerance;
  std::string out = ".";
};

int cmd_analyze(const AnalyzeOptions& o, const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  if (o.inputs.empty()) throw InputError("no trajectories given");
  GramCloud cloud;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    std::string text;
    try {
      text = read_file(o.inputs[i]);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    for (const auto& row : rows_from_csv(text)) {
      if (!row.g.positive_definite()) throw InputError(o.inputs[i] + ": Gram sample is not positive definite");
      cloud.add({row.g, static_cast<int>(i), row.t});
    }
  }
  if (cloud.empty()) throw InputError("trajectories contain no samples");

  json report;
  report["order"] = kMonomialOrder;
  report["degree"] = o.degree;
  report["points"] = cloud.size();
  report["relations"] = json::array();
  double worst = 0.0;
  try {
    for (const auto& rel : fit_relations(cloud, o.degree, o.svd_threshold)) {
      json r = to_json(rel);
      const double res = relation_residual(rel, cloud);
      worst = std::max(worst, res);
      r["residual"] = res;
      report["relations"].push_back(r);
    }
  } catch (const std::invalid_argument& e) {
    report["relations_skipped"] = e.what();
  }
  report["max_relation_residual"] = worst;

  const double spacing = median_spacing(cloud);
  const double radius = o.radius ? *o.radius : std::max(10.0 * spacing, 1e-12);
  report["radius"] = radius;
  report["clusters"] = json::array();
  int max_dim = -1;
  for (const auto& members : gram_clusters(cloud, radius)) {
    json c;
    c["path"] = cloud.points[members.front()].path;
    c["size"] = members.size();
    try {
      const int d = cluster_local_dimension(cloud, members, radius, o.dimension_tolerance);
      c["dimension"] = d;
      max_dim = std::max(max_dim, d);
    } catch (const std::invalid_argument&) {
      c["dimension"] = nullptr;
    }
    report["clusters"].push_back(c);
  }
  report["max_local_dimension"] = max_dim;

  const std::string rel_path = out_path(o.out, "relations.json");
  const std::string svg_path = out_path(o.out, "gram.svg");
  write_file_atomic(rel_path, report.dump(2) + "\n");
  write_file_atomic(svg_path, gram_svg(cloud));
  json m = manifest("analyze", args, o.inputs, {rel_path, svg_path});
  m["degree"] = o.degree;
  m["svd_threshold"] = o.svd_threshold;
  m["dimension_tolerance"] = o.dimension_tolerance;
  write_file_atomic(out_path(o.out, "manifest.json"), m.dump(2) + "\n");

  out << report["relations"].size() << " relations, max local dimension " << max_dim << "\n";
  if (max_dim >= 2) {
    err << "local dimension " << max_dim << " exceeds 1\n";
    return kDimensionAlarm;
  }
  return kOk;
}

int cmd_reduce(const std::string& input, const std::string& dir, const std::vector<std::string>& args,
               std::ostream& out) {
  const SurfaceDocument doc = load_document(input);
  require_valid(doc.complex);
  ReductionTrace trace;
  BaseCaseStructure base;
  try {
    trace = reduce(doc.complex);
    base = base_case_structure(trace.final_complex);
  } catch (const ReductionError& e) {
    throw InputError(std::string("reduction failed: ") + e.what());
  }
  json report = to_json(trace);
  report["base_case"] = to_json(base);
  if (doc.realization) {
    Realization r;
    for (int o : trace.orbit_map) r.positions.push_back(doc.realization->positions[static_cast<std::size_t>(o)]);
    r.a = doc.realization->a;
    r.b = doc.realization->b;
    const BasisInnerProducts ip = basis_inner_products(base, all_edge_lengths(trace.final_complex, r));
    report["inner_products"] = {{"lambda_lambda", ip.lambda_lambda}, {"lambda_mu", ip.lambda_mu}};
  }
  const std::string path = out_path(dir, "reduction.json");
  write_file_atomic(path, report.dump(2) + "\n");
  write_file_atomic(out_path(dir, "manifest.json"), manifest("reduce", args, {input}, {path}).dump(2) + "\n");
  out << trace.moves.size() << " moves, base case q=" << base.q() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flexes of doubly periodic polyhedral surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  BuildOptions build;
  auto* b = app.add_subcommand("build", "Write an example surface (plane, grid, miura)");
  b->add_option("example", build.example, "plane | grid | miura")->required();
  b->add_option("--a", build.a, "plane: period vector a as x,y,z");
  b->add_option("--b", build.b, "plane: period vector b as x,y,z");
  b->add_option("--sublattice", build.sublattice, "plane/grid: integer matrix c00,c01,c10,c11");
  b->add_option("--side", build.side, "grid: square side");
  b->add_option("--fold-angle", build.fold_angle, "plane/grid: accordion fold angle (radians)");
  b->add_option("--fold-family", build.fold_family, "plane/grid: a | b | a-b");
  b->add_option("--alpha", build.alpha, "miura: parallelogram angle");
  b->add_option("--a0", build.a0, "miura: |a0|");
  b->add_option("--b0", build.b0, "miura: |b0|");
  b->add_option("--z", build.z, "miura: fold height");
  b->add_option("--star", build.star, "star-subdivide the triangle with this index");
  b->add_option("--out", build.out, "output directory");

  std::string validate_input;
  auto* v = app.add_subcommand("validate", "Check a surface file");
  v->add_option("input", validate_input)->required();

  TraceOptions trace;
  auto* t = app.add_subcommand("trace", "Trace flexes from the realization in a surface file");
  t->add_option("input", trace.input)->required();
  t->add_option("--steps", trace.steps);
  t->add_option("--step-size", trace.settings.step_size);
  t->add_option("--rank-tol", trace.settings.rank_tolerance);
  t->add_option("--corrector-tol", trace.settings.corrector_tolerance);
  t->add_option("--max-iter", trace.settings.max_corrector_iterations);
  t->add_option("--seed-branch", trace.seed_branch, "trace only this flex-space basis direction");
  t->add_flag("--coords", trace.coords, "append chart coordinates to the CSV");
  t->add_option("--out", trace.out);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Fit relations and estimate the local dimension of Gram samples");
  a->add_option("inputs", analyze.inputs, "trajectory CSV files")->required();
  a->add_option("--degree", analyze.degree);
  a->add_option("--svd-threshold", analyze.svd_threshold);
  a->add_option("--radius", analyze.radius, "neighbourhood radius (default 10x median spacing)");
  a->add_option("--dim-tol", analyze.dimension_tolerance);
  a->add_option("--out", analyze.out);

  std::string reduce_input, reduce_out = ".";
  auto* r = app.add_subcommand("reduce", "Run the combinatorial reduction to a base case");
  r->add_option("input", reduce_input)->required();
  r->add_option("--out", reduce_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (b->parsed()) return cmd_build(build, args, out);
    if (v->parsed()) return cmd_validate(validate_input, out);
    if (t->parsed()) return cmd_trace(trace, args, out);
    if (a->parsed()) return cmd_analyze(analyze, args, out, err);
    if (r->parsed()) return cmd_reduce(reduce_input, reduce_out, args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const OffManifoldError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace flexlat::cli
