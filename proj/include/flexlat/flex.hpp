#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flexlat/complex.hpp"
#include "flexlat/realization.hpp"

namespace flexlat {

/// Gauge-fixed chart coordinates: three per non-pinned orbit (in orbit
/// order), then (a1, b1, b2). The pinned vertex sits at the origin.
struct Configuration {
  Eigen::VectorXd coords;
  int n_orbits = 0;
  int pinned = 0;

  static Configuration from_realization(const Realization& r, const GaugeFrame& frame = {});
  Realization to_realization() const;

  Eigen::Index size() const { return coords.size(); }
  Eigen::Index slot(int orbit) const { return 3 * static_cast<Eigen::Index>(orbit < pinned ? orbit : orbit - 1); }
  Eigen::Index lattice_slot() const { return 3 * static_cast<Eigen::Index>(n_orbits - 1); }
  double a1() const { return coords[lattice_slot()]; }
  double b1() const { return coords[lattice_slot() + 1]; }
  double b2() const { return coords[lattice_slot() + 2]; }
  bool chart_valid() const { return a1() > 0.0 && b2() > 0.0; }
  GramMatrix gram() const { return {a1() * a1(), a1() * b1(), b1() * b1() + b2() * b2()}; }

  Configuration with_coords(Eigen::VectorXd x) const { return {std::move(x), n_orbits, pinned}; }
};

struct SolverSettings {
  double rank_tolerance = 1e-8;
  double corrector_tolerance = 1e-10;
  double step_size = 1e-2;
  int max_corrector_iterations = 25;

  bool valid() const {
    return rank_tolerance > 0 && corrector_tolerance > 0 && step_size > 0 && max_corrector_iterations > 0;
  }
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OffManifoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Eigen::MatrixXd constraint_jacobian(const PeriodicComplex& c, const Configuration& q);

Eigen::VectorXd constraint_residuals(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target);

struct FlexSpace {
  int dimension = 0;
  Eigen::MatrixXd basis;  // orthonormal columns
  Eigen::VectorXd singular_values;
};

FlexSpace infinitesimal_flex_space(const Eigen::MatrixXd& jacobian, const SolverSettings& s = {});

int jacobian_rank(const Eigen::MatrixXd& jacobian, const SolverSettings& s = {});

/// Gauss-Newton with minimum-norm steps and at most four step halvings per
/// iteration. Throws ConvergenceError.
Configuration project_newton(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target,
                             const SolverSettings& s = {}, int* iterations = nullptr);

enum class StopReason {
  kCompleted,
  kCorrectorFailure,
  kChartBoundary,
  kTangentLost,
};

std::string to_string(StopReason reason);

struct FlexSample {
  double t = 0.0;
  Configuration q;
  GramMatrix g;
  double residual_norm = 0.0;
};

struct FlexPath {
  std::vector<FlexSample> samples;
  Eigen::VectorXd initial_tangent;
  StopReason stop = StopReason::kCompleted;
};

/// Predictor-corrector continuation along the flex through q0. Throws
/// OffManifoldError when q0 does not satisfy the target lengths and
/// std::invalid_argument when `direction` is not an infinitesimal flex.
FlexPath trace_flex(const PeriodicComplex& c, const Configuration& q0, const Eigen::VectorXd& direction, int steps,
                    const EdgeLengths& target, const SolverSettings& s = {});

/// Jacobian of (g11, g12, g22) with respect to the chart coordinates.
Eigen::MatrixXd gram_differential(const Configuration& q);

int gram_tangent_rank(const PeriodicComplex& c, const Configuration& q, const SolverSettings& s = {});

/// The Jacobian rank is unchanged at nearby points of the constraint set
/// (random 1e-6 perturbations projected back).
bool is_regular(const PeriodicComplex& c, const Configuration& q, const EdgeLengths& target,
                const SolverSettings& s = {}, unsigned seed = 7);

}  // namespace flexlat
