#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hopfnet/criteria.hpp"
#include "hopfnet/dynamics.hpp"

namespace hopfnet {

struct Trajectory {
  std::vector<double> times;             // strictly increasing samples
  std::vector<Eigen::VectorXd> states;   // positive
  double rtol = 0.0, atol = 0.0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int n_samples = 2000;  // dense-output sample count over [0, t_end]
};

/// Dormand-Prince 5(4) with PI step control and cubic Hermite dense output.
/// open == nullptr integrates the closed system. Throws on step-size
/// underflow ("stiff - inconclusive") and when the state leaves the
/// positive orthant beyond atol.
Trajectory integrate(const Network& net, const RateConstants& a,
                     const OpenParameters* open, const Eigen::VectorXd& x0,
                     double t_end, const IntegrateOptions& opts = {});

struct OscillationMetrics {
  bool oscillating = false;
  int species_index = -1;      // argmax-amplitude species
  double period_estimate = 0;  // mean inter-peak interval
  double amplitude = 0;
  double transient_cut = 0;    // fraction discarded
  double peak_spread = 0;      // relative spread of inter-peak intervals
  int peak_count = 0;
};

/// Peak-based detection on the post-transient tail: oscillating iff some
/// species shows >= 5 maxima of amplitude >= threshold * range with
/// inter-peak spread <= 5%. Throws if the tail is too short to judge.
OscillationMetrics detect_oscillation(const Trajectory& traj,
                                      double transient_fraction = 0.5,
                                      double threshold = 0.05);

/// Integrates just past a certified Hopf point (criterion I: fully-open
/// system at beta* - delta; criterion II: realized system at
/// gamma(beta_c + delta toward the unstable side)) from a 1% kick along
/// the crossing eigenplane, and measures the resulting oscillation.
std::pair<Trajectory, OscillationMetrics> hopf_demo(
    const Network& net, const RateConstants& a, const CriterionOutcome& outcome,
    double delta, double t_end, const IntegrateOptions& opts = {});

}  // namespace hopfnet
