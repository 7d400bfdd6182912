#include "hopfnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hopfnet {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct RhsEval {
  Eigen::MatrixXd N;
  Eigen::MatrixXi Y;
  Eigen::VectorXd a;
  const OpenParameters* open;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(a.size());
    for (int i = 0; i < a.size(); ++i) {
      double m = 1.0;
      for (int n = 0; n < x.size(); ++n)
        for (int k = 0; k < Y(n, i); ++k) m *= x[n];
      r[i] = a[i] * m;
    }
    Eigen::VectorXd f = N * r;
    if (open) f += open->F - open->D.cwiseProduct(x);
    return f;
  }
};

}  // namespace

Trajectory integrate(const Network& net, const RateConstants& a,
                     const OpenParameters* open, const Eigen::VectorXd& x0,
                     double t_end, const IntegrateOptions& opts) {
  if (!(t_end > 0)) throw std::invalid_argument("t_end must be positive");
  if (!(opts.rtol > 0) || !(opts.atol > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(x0.minCoeff() > 0))
    throw std::domain_error("initial condition must be entrywise positive");

  const RhsEval f{stoichiometric_matrix(net).cast<double>(), kinetic_matrix(net),
                  a.a, open};
  const int dim = static_cast<int>(x0.size());

  Trajectory traj;
  traj.rtol = opts.rtol;
  traj.atol = opts.atol;
  traj.times.reserve(opts.n_samples + 1);
  traj.states.reserve(opts.n_samples + 1);

  const double dt_sample = t_end / opts.n_samples;
  int next_sample = 0;

  double t = 0.0;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd k1 = f(x);
  double h = 1e-4 * t_end;
  double err_prev = 1.0;  // PI controller memory

  auto emit_samples_through = [&](double t_new, const Eigen::VectorXd& x_new,
                                  const Eigen::VectorXd& k_new) {
    // Cubic Hermite dense output on [t, t_new].
    while (next_sample <= opts.n_samples && next_sample * dt_sample <= t_new + 1e-14 * t_end) {
      const double ts = std::min(next_sample * dt_sample, t_new);
      const double hh = t_new - t;
      Eigen::VectorXd xs;
      if (hh <= 0) {
        xs = x_new;
      } else {
        const double s = (ts - t) / hh;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        xs = h00 * x + h10 * hh * k1 + h01 * x_new + h11 * hh * k_new;
      }
      traj.times.push_back(ts);
      traj.states.push_back(xs);
      ++next_sample;
    }
  };

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, t_end))
      throw std::runtime_error("stiff - inconclusive: step size underflow at t = " +
                               std::to_string(t));

    const Eigen::VectorXd k2 = f(x + h * (a21 * k1));
    const Eigen::VectorXd k3 = f(x + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd x_new =
        x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = f(x_new);  // FSAL
    const Eigen::VectorXd err_vec =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(x[n]), std::abs(x_new[n]));
      err = std::max(err, std::abs(err_vec[n]) / sc);
    }

    if (err <= 1.0 && x_new.allFinite()) {
      if (x_new.minCoeff() < -opts.atol)
        throw std::runtime_error("state left the positive orthant at t = " +
                                 std::to_string(t + h));
      emit_samples_through(t + h, x_new, k7);
      t += h;
      x = x_new;
      k1 = k7;
      ++traj.steps_accepted;
      // PI controller (order 5 pair).
      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-10);
    } else {
      ++traj.steps_rejected;
      const double fac = x_new.allFinite()
                             ? std::clamp(0.9 * std::pow(err, -1.0 / 5.0), 0.1, 1.0)
                             : 0.1;
      h *= fac;
    }
  }
  return traj;
}

namespace {

struct Peak {
  double t;
  double value;
};

// Quadratic fit through the three samples around a discrete maximum.
Peak refine_peak(const Trajectory& traj, int species, int i) {
  const double t0 = traj.times[i - 1], t1 = traj.times[i], t2 = traj.times[i + 1];
  const double y0 = traj.states[i - 1][species], y1 = traj.states[i][species],
               y2 = traj.states[i + 1][species];
  const double denom = (y0 - 2 * y1 + y2);
  if (std::abs(denom) < 1e-300) return {t1, y1};
  const double dt = 0.5 * (t2 - t0);
  const double shift = 0.5 * (y0 - y2) / denom;
  return {t1 + shift * dt, y1 - 0.25 * (y0 - y2) * shift};
}

}  // namespace

OscillationMetrics detect_oscillation(const Trajectory& traj,
                                      double transient_fraction,
                                      double threshold) {
  if (traj.times.size() < 20) throw std::runtime_error("trajectory too short");
  const int dim = static_cast<int>(traj.states.front().size());
  const size_t start =
      static_cast<size_t>(transient_fraction * traj.times.size());
  if (traj.times.size() - start < 10)
    throw std::runtime_error("trajectory too short after transient cut");

  OscillationMetrics best;
  best.transient_cut = transient_fraction;

  for (int sp = 0; sp < dim; ++sp) {
    double lo = traj.states[start][sp], hi = lo;
    for (size_t i = start; i < traj.times.size(); ++i) {
      lo = std::min(lo, traj.states[i][sp]);
      hi = std::max(hi, traj.states[i][sp]);
    }
    const double range = hi - lo;
    if (range <= 0) continue;

    std::vector<Peak> peaks;
    for (size_t i = std::max(start, size_t(1)); i + 1 < traj.times.size(); ++i) {
      const double y = traj.states[i][sp];
      if (y > traj.states[i - 1][sp] && y > traj.states[i + 1][sp] &&
          y - lo >= threshold * range)
        peaks.push_back(refine_peak(traj, sp, static_cast<int>(i)));
    }
    if (peaks.size() < 5) continue;

    // Judge periodicity from the last five cycles.
    std::vector<double> intervals;
    const size_t tail = peaks.size() >= 6 ? peaks.size() - 6 : 0;
    for (size_t i = tail + 1; i < peaks.size(); ++i)
      intervals.push_back(peaks[i].t - peaks[i - 1].t);
    const double mean =
        std::accumulate(intervals.begin(), intervals.end(), 0.0) / intervals.size();
    double spread = 0.0;
    for (double iv : intervals)
      spread = std::max(spread, std::abs(iv - mean) / mean);
    if (spread > 0.05) continue;

    const double amplitude = range;
    if (!best.oscillating || amplitude > best.amplitude) {
      best.oscillating = true;
      best.species_index = sp;
      best.period_estimate = mean;
      best.amplitude = amplitude;
      best.peak_spread = spread;
      best.peak_count = static_cast<int>(peaks.size());
    }
  }
  return best;
}

std::pair<Trajectory, OscillationMetrics> hopf_demo(
    const Network& net, const RateConstants& a, const CriterionOutcome& outcome,
    double delta, double t_end, const IntegrateOptions& opts) {
  if (outcome.verdict != Verdict::Certified)
    throw std::invalid_argument("hopf_demo needs a certified outcome");
  if (!(delta > 0))
    throw std::invalid_argument("delta must be positive: at delta = 0 the steady "
                                "state is non-hyperbolic");

  Network demo_net = net;
  RateConstants demo_a = a;
  Eigen::VectorXd xbar;
  Eigen::MatrixXd J;
  OpenParameters open;
  const OpenParameters* open_ptr = nullptr;

  if (outcome.criterion == 1) {
    const auto& w = *outcome.witness1;
    xbar = w.xbar;
    const double beta = w.beta_star - delta;
    if (!(beta > 0)) throw std::invalid_argument("delta pushes beta below zero");
    open.D = Eigen::VectorXd::Constant(net.species_count(), beta);
    open.F = beta * xbar;
    open_ptr = &open;
    J = open_jacobian(net, a, open, xbar);
  } else {
    const auto& w = *outcome.witness2;
    // Step past the crossing toward the unstable endpoint (h_u side has the
    // larger unstable count by construction).
    const double beta = std::min(1.0, w.crossing_beta + delta);
    Eigen::VectorXd h = ((1.0 - beta) * w.h_s.array().log() +
                         beta * w.h_u.array().log()).exp().matrix();
    xbar = h.cwiseInverse();
    demo_a = fit_rate_constants(net, xbar, w.rbar);
    J = jacobian(net, demo_a, xbar);
  }

  // Kick 1% of |xbar| along the real part of the crossing eigenvector.
  Eigen::EigenSolver<Eigen::MatrixXd> solver(J);
  int lead = 0;
  double lead_key = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < J.rows(); ++i) {
    const auto ev = solver.eigenvalues()[i];
    const double key = ev.real() - (ev.imag() > 0 ? 0.0 : 1e-12);
    if (std::abs(ev.imag()) > 0 && key > lead_key) {
      lead_key = key;
      lead = i;
    }
  }
  Eigen::VectorXd dir = solver.eigenvectors().col(lead).real();
  if (dir.norm() < 1e-12) dir = solver.eigenvectors().col(lead).imag();
  dir.normalize();

  Eigen::VectorXd x0 = xbar + 0.01 * xbar.norm() * dir;
  if (!(x0.minCoeff() > 0)) x0 = xbar - 0.01 * xbar.norm() * dir;

  Trajectory traj = integrate(outcome.criterion == 1 ? net : demo_net,
                              outcome.criterion == 1 ? a : demo_a, open_ptr, x0,
                              t_end, opts);
  OscillationMetrics metrics = detect_oscillation(traj);
  return {std::move(traj), std::move(metrics)};
}

}  // namespace hopfnet
