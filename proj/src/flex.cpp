#include "flexlat/flex.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace flexlat {

namespace {

constexpr int kMaxStepHalvings = 4;
constexpr int kMaxPredictorHalvings = 6;
// A direction counts as an infinitesimal flex when its component outside the
// flex space is below this fraction of its norm.
constexpr double kDirectionTolerance = 1e-6;
// The tangent is lost when the previous tangent has almost no component in
// the new flex space.
constexpr double kTangentRetention = 1e-3;

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

Configuration Configuration::from_realization(const Realization& r, const GaugeFrame& frame) {
  const Realization g = apply_gauge(r, frame);
  Configuration q;
  q.n_orbits = static_cast<int>(g.positions.size());
  q.pinned = frame.pinned;
  q.coords.resize(3 * q.n_orbits);
  for (int o = 0; o < q.n_orbits; ++o) {
    if (o == q.pinned) continue;
    q.coords.segment<3>(q.slot(o)) = g.positions[o];
  }
  q.coords.segment<3>(q.lattice_slot()) = Eigen::Vector3d(g.a.x(), g.b.x(), g.b.y());
  return q;
}

Realization Configuration::to_realization() const {
  Realization r;
  r.positions.assign(n_orbits, Vec3::Zero());
  for (int o = 0; o < n_orbits; ++o)
    if (o != pinned) r.positions[o] = coords.segment<3>(slot(o));
  r.a = Vec3(a1(), 0.0, 0.0);
  r.b = Vec3(b1(), b2(), 0.0);
  return r;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kCompleted: return "completed";
    case StopReason::kCorrectorFailure: return "corrector_failure";
    case StopReason::kChartBoundary: return "chart_boundary";
    case StopReason::kTangentLost: return "tangent_lost";
  }
  return "unknown";
}

Eigen::MatrixXd constraint_jacobian(const PeriodicComplex& c, const Configuration& q) {
  const auto cons = c.constraints();
  const Realization r = q.to_realization();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cons.size()), q.size());
  const Eigen::Index lat = q.lattice_slot();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const Edge& e = cons[i];
    const auto row = static_cast<Eigen::Index>(i);
    const Vec3 d = r.position({e.v, e.shift}) - r.positions[e.u];
    if (e.v != q.pinned) J.row(row).segment<3>(q.slot(e.v)) += 2.0 * d.transpose();
    if (e.u != q.pinned) J.row(row).segment<3>(q.slot(e.u)) -= 2.0 * d.transpose();
    const double m = static_cast<double>(e.shift.m);
    const double k = static_cast<double>(e.shift.k);
    J(row, lat) += 2.0 * m * d.x();
    J(row, lat + 1) += 2.0 * k * d.x();
    J(row, lat + 2) += 2.0 * k * d.y();
  }
  return J;
}

Eigen::VectorXd constraint_residuals(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target) {
  return residuals(c, q.to_realization(), target);
}

FlexSpace infinitesimal_flex_space(const Eigen::MatrixXd& jacobian, const SolverSettings& s) {
  FlexSpace out;
  const Eigen::Index n = jacobian.cols();
  if (jacobian.rows() == 0) {
    out.dimension = static_cast<int>(n);
    out.basis = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const int rank = jacobian_rank(jacobian, s);
  out.dimension = static_cast<int>(n) - rank;
  out.basis = svd.matrixV().rightCols(out.dimension);
  return out;
}

int jacobian_rank(const Eigen::MatrixXd& jacobian, const SolverSettings& s) {
  if (jacobian.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > s.rank_tolerance * sv[0]) ++rank;
  return rank;
}

Configuration project_newton(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target,
                             const SolverSettings& s, int* iterations) {
  Configuration cur = q;
  Eigen::VectorXd r = constraint_residuals(c, cur, target);
  int iter = 0;
  while (max_abs(r) > s.corrector_tolerance) {
    if (iter >= s.max_corrector_iterations)
      throw ConvergenceError("corrector did not converge in " + std::to_string(iter) + " iterations");
    const Eigen::MatrixXd J = constraint_jacobian(c, cur);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(s.rank_tolerance);
    const Eigen::VectorXd step = -svd.solve(r);

    double alpha = 1.0;
    Configuration next = cur.with_coords(cur.coords + step);
    Eigen::VectorXd r_next = constraint_residuals(c, next, target);
    for (int h = 0; h < kMaxStepHalvings && !(r_next.norm() <= r.norm()); ++h) {
      alpha *= 0.5;
      next = cur.with_coords(cur.coords + alpha * step);
      r_next = constraint_residuals(c, next, target);
    }
    if (!r_next.allFinite()) throw ConvergenceError("corrector diverged");
    cur = std::move(next);
    r = std::move(r_next);
    ++iter;
  }
  if (iterations) *iterations = iter;
  return cur;
}

FlexPath trace_flex(const PeriodicComplex& c, const Configuration& q0, const Eigen::VectorXd& direction, int steps,
                    const EdgeLengths& target, const SolverSettings& s) {
  const Eigen::VectorXd r0 = constraint_residuals(c, q0, target);
  if (max_abs(r0) > s.corrector_tolerance)
    throw OffManifoldError("start configuration violates the target lengths by " + std::to_string(max_abs(r0)));
  if (direction.size() != q0.size() || direction.norm() == 0.0)
    throw std::invalid_argument("direction has the wrong size or is zero");

  const FlexSpace space0 = infinitesimal_flex_space(constraint_jacobian(c, q0), s);
  const Eigen::VectorXd projected = space0.basis * (space0.basis.transpose() * direction);
  if ((direction - projected).norm() > kDirectionTolerance * direction.norm())
    throw std::invalid_argument("direction is not an infinitesimal flex (flex space dimension " +
                                std::to_string(space0.dimension) + ")");

  FlexPath path;
  Eigen::VectorXd tangent = projected.normalized();
  path.initial_tangent = tangent;
  path.samples.push_back({0.0, q0, q0.gram(), max_abs(r0)});

  double t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Configuration& cur = path.samples.back().q;
    std::optional<Configuration> accepted;
    StopReason failure = StopReason::kCorrectorFailure;
    for (int halving = 0; halving <= kMaxPredictorHalvings && !accepted; ++halving) {
      const double h = s.step_size / std::ldexp(1.0, halving);
      const Configuration predicted = cur.with_coords(cur.coords + h * tangent);
      if (!predicted.chart_valid()) {
        failure = StopReason::kChartBoundary;
        continue;
      }
      Configuration corrected;
      try {
        corrected = project_newton(c, predicted, target, s);
      } catch (const ConvergenceError&) {
        failure = StopReason::kCorrectorFailure;
        continue;
      }
      if (!corrected.chart_valid() || !corrected.gram().positive_definite()) {
        failure = StopReason::kChartBoundary;
        continue;
      }
      if ((corrected.coords - cur.coords).norm() > 2.0 * s.step_size) {
        failure = StopReason::kCorrectorFailure;
        continue;
      }
      accepted = std::move(corrected);
    }
    if (!accepted) {
      path.stop = failure;
      return path;
    }

    const FlexSpace space = infinitesimal_flex_space(constraint_jacobian(c, *accepted), s);
    Eigen::VectorXd next_tangent = space.basis * (space.basis.transpose() * tangent);
    t += (accepted->coords - cur.coords).norm();
    const Eigen::VectorXd res = constraint_residuals(c, *accepted, target);
    path.samples.push_back({t, *accepted, accepted->gram(), max_abs(res)});
    if (next_tangent.norm() < kTangentRetention) {
      path.stop = StopReason::kTangentLost;
      return path;
    }
    tangent = next_tangent.normalized();
  }
  path.stop = StopReason::kCompleted;
  return path;
}

Eigen::MatrixXd gram_differential(const Configuration& q) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, q.size());
  const Eigen::Index lat = q.lattice_slot();
  D(0, lat) = 2.0 * q.a1();
  D(1, lat) = q.b1();
  D(1, lat + 1) = q.a1();
  D(2, lat + 1) = 2.0 * q.b1();
  D(2, lat + 2) = 2.0 * q.b2();
  return D;
}

int gram_tangent_rank(const PeriodicComplex& c, const Configuration& q, const SolverSettings& s) {
  const FlexSpace space = infinitesimal_flex_space(constraint_jacobian(c, q), s);
  if (space.dimension == 0) return 0;
  const Eigen::MatrixXd D = gram_differential(q);
  const Eigen::MatrixXd projected = D * space.basis;
  const double scale = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues()[0];
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(projected).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > s.rank_tolerance * scale) ++rank;
  return rank;
}

bool is_regular(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target,
                const SolverSettings& s, unsigned seed) {
  const int rank = jacobian_rank(constraint_jacobian(c, q), s);
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd noise(q.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = normal(rng);
    noise *= 1e-6 / noise.norm();
    try {
      const Configuration nearby = project_newton(c, q.with_coords(q.coords + noise), target, s);
      if (jacobian_rank(constraint_jacobian(c, nearby), s) != rank) return false;
    } catch (const ConvergenceError&) {
      return false;
    }
  }
  return true;
}

}  // namespace flexlat
