#include "hopfnet/criteria.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hopfnet {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::HypothesesFailed: return "hypotheses-failed";
  }
  return "?";
}

Eigen::MatrixXd convex_jacobian(const Eigen::MatrixXi& N,
                                const Eigen::MatrixXi& Y,
                                const ExtremeRayMatrix& E,
                                const ConvexCoordinates& coords) {
  if (coords.h.size() != N.rows()) throw std::invalid_argument("h size mismatch");
  const Eigen::VectorXd flux = flux_from_weights(E, coords.j);
  return N.cast<double>() * flux.asDiagonal() * Y.cast<double>().transpose() *
         coords.h.asDiagonal();
}

std::pair<RateConstants, SteadyState> realize_system(
    const Network& net, const ExtremeRayMatrix& E,
    const ConvexCoordinates& coords) {
  for (int n = 0; n < coords.h.size(); ++n)
    if (!(coords.h[n] > 0)) throw std::domain_error("h must be entrywise positive");
  const Eigen::VectorXd rbar = flux_from_weights(E, coords.j);
  if (!(rbar.minCoeff() > 0))
    throw std::domain_error("E j must be entrywise strictly positive");
  const Eigen::VectorXd xbar = coords.h.cwiseInverse();
  RateConstants a = fit_rate_constants(net, xbar, rbar);
  SteadyState ss{xbar, residual_norm(net, a, xbar)};
  return {std::move(a), std::move(ss)};
}

CriterionOutcome criterion1(const Network& net, const RateConstants& a,
                            const Eigen::VectorXd& xbar, double tol) {
  CriterionOutcome out;
  out.criterion = 1;

  const double resid = residual_norm(net, a, xbar);
  const double scale = std::max(1.0, rate_vector(net, a, xbar).lpNorm<Eigen::Infinity>());
  if (resid > std::max(tol, 1e-9 * scale))
    throw std::runtime_error("xbar is not a steady state (residual " +
                             std::to_string(resid) + ")");

  const Eigen::MatrixXd G = jacobian(net, a, xbar);
  const Theorem1Check check = theorem1_hypotheses(G, default_classify_tol(G));
  if (!check.holds) {
    out.verdict = Verdict::HypothesesFailed;
    out.diagnostics.push_back(
        "no simple complex pair with positive real part and isolated real part");
    return out;
  }

  Criterion1Witness w;
  w.xbar = xbar;
  w.a = a;
  w.beta_star = check.pair.real();
  w.strengthened = check.strengthened;
  w.D = Eigen::VectorXd::Constant(net.species_count(), w.beta_star);
  w.F = w.beta_star * xbar;

  const Eigen::MatrixXd H = open_jacobian(net, a, {w.F, w.D}, xbar);
  w.report_at_beta_star = classify(H, tol);
  std::ostringstream diag;
  diag << "beta* = " << w.beta_star << ", shifted spectrum has " << w.report_at_beta_star.n_zero
       << " eigenvalue(s) on the axis at tol " << tol;
  out.diagnostics.push_back(diag.str());

  // Exactly the crossing pair on the axis, nothing else.
  if (w.report_at_beta_star.n_zero != 2) {
    out.verdict = Verdict::Inconclusive;
    out.diagnostics.push_back("shifted Jacobian does not isolate one imaginary pair");
    return out;
  }
  out.verdict = Verdict::Certified;
  out.witness1 = std::move(w);
  return out;
}

namespace {

Eigen::VectorXd curve_point(const Eigen::VectorXd& h_s, const Eigen::VectorXd& h_u,
                            double beta) {
  // Entrywise log-linear: positive and analytic over the whole segment.
  return ((1.0 - beta) * h_s.array().log() + beta * h_u.array().log()).exp().matrix();
}

struct CurveSample {
  SpectralReport report;
  int n_pos = 0;
  double det_sign = 0.0;
  double crossing_re = 0.0;  // real part of the smallest-|Re| nonkernel pair
};

CurveSample sample_curve(const Eigen::MatrixXi& N, const Eigen::MatrixXi& Y,
                         const ExtremeRayMatrix& E, const Eigen::VectorXd& jbar,
                         const Eigen::VectorXd& h, int rank) {
  const Eigen::MatrixXd G = convex_jacobian(N, Y, E, {h, jbar});
  const int n = static_cast<int>(G.rows());
  const double tol = default_classify_tol(G);
  CurveSample s;
  s.report = classify(G, tol);
  if (rank == n) {
    s.n_pos = s.report.n_pos;
    s.det_sign = G.fullPivLu().determinant() > 0 ? 1.0 : -1.0;
  } else {
    const RankAwareCounts counts = rank_aware_counts(G, rank, tol);
    s.n_pos = counts.n_pos_of_r;
    s.det_sign = 0.0;  // determinant is structurally zero
  }
  // Eigenvalues are sorted by descending real part; the crossing pair is the
  // nonkernel eigenvalue of smallest |Re|.
  double best = std::numeric_limits<double>::infinity();
  const double kernel_band = (rank == n) ? 0.0 : tol * std::max(1.0, G.lpNorm<Eigen::Infinity>());
  for (const auto& ev : s.report.eigenvalues) {
    if (std::abs(ev) <= kernel_band) continue;
    if (std::abs(ev.real()) < std::abs(best)) best = ev.real();
  }
  s.crossing_re = best;
  return s;
}

}  // namespace

HopfCurve hopf_scan(const Eigen::MatrixXi& N, const Eigen::MatrixXi& Y,
                    const ExtremeRayMatrix& E, const Eigen::VectorXd& jbar,
                    const Eigen::VectorXd& h_s, const Eigen::VectorXd& h_u,
                    int grid, double tol, int rank) {
  if (grid < 2) throw std::invalid_argument("grid must be >= 2");
  for (const auto* h : {&h_s, &h_u})
    if (!(h->minCoeff() > 0)) throw std::domain_error("curve endpoints must be positive");

  HopfCurve curve;
  curve.h_s = h_s;
  curve.h_u = h_u;

  std::vector<CurveSample> samples;
  double det_sign = 0.0;
  for (int g = 0; g <= grid; ++g) {
    const double beta = static_cast<double>(g) / grid;
    CurveSample s = sample_curve(N, Y, E, jbar, curve_point(h_s, h_u, beta), rank);
    if (g == 0)
      det_sign = s.det_sign;
    else if (s.det_sign != det_sign)
      throw std::runtime_error(
          "internal inconsistency: sign det G changed along the curve");
    curve.grid_beta.push_back(beta);
    curve.samples.push_back(s.report);
    samples.push_back(std::move(s));
  }

  std::vector<CrossingBracket> brackets;
  for (int g = 0; g + 1 <= grid; ++g)
    if (samples[g].n_pos != samples[g + 1].n_pos)
      brackets.push_back({static_cast<double>(g) / grid,
                          static_cast<double>(g + 1) / grid});
  if (brackets.empty())
    throw std::runtime_error("no net stability change detected on the grid; "
                             "increase the grid resolution");
  curve.extra_brackets.assign(brackets.begin() + 1, brackets.end());

  // Bisection on the first bracket until the crossing pair sits on the axis.
  double lo = brackets[0].lo, hi = brackets[0].hi;
  const int lo_count = sample_curve(N, Y, E, jbar, curve_point(h_s, h_u, lo), rank).n_pos;
  CurveSample mid_sample;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    mid_sample = sample_curve(N, Y, E, jbar, curve_point(h_s, h_u, mid), rank);
    if (std::abs(mid_sample.crossing_re) <= tol) break;
    if (mid_sample.n_pos == lo_count)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16) break;
  }
  if (std::abs(mid_sample.crossing_re) > tol)
    throw std::runtime_error("bisection failed to refine the crossing below tolerance");

  curve.crossing_beta = mid;
  curve.report_at_crossing = mid_sample.report;
  return curve;
}

namespace {

CriterionOutcome criterion2_impl(const Network& net, const Criterion2Options& opts,
                                 bool rank_aware) {
  if (opts.samples < 1) throw std::invalid_argument("samples must be >= 1");
  CriterionOutcome out;
  out.criterion = 2;

  const Eigen::MatrixXi N = stoichiometric_matrix(net);
  const Eigen::MatrixXi Y = kinetic_matrix(net);
  const int n = net.species_count();
  const int rank = rational_rank(to_rational(N));
  if (rank_aware && rank == n)
    throw std::invalid_argument("rank-aware variant requires rank(N) < |S|");
  if (!rank_aware && rank < n)
    throw std::invalid_argument("stoichiometric matrix is rank-deficient; use the rank-aware variant");

  const ExtremeRayMatrix E = extreme_rays(N);
  if (E.trivial())
    throw std::runtime_error("the flux cone is trivial (p = 0); no steady-state flux exists");
  const int p = E.ray_count();

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);  // log10 weights

  for (int sample = 0; sample < opts.samples; ++sample) {
    Eigen::VectorXd jbar(p);
    for (int k = 0; k < p; ++k) jbar[k] = std::pow(10.0, uni(rng));
    const Eigen::VectorXd flux = flux_from_weights(E, jbar);
    if (!(flux.minCoeff() > 0)) {
      out.diagnostics.push_back("sample " + std::to_string(sample) +
                                ": E j not strictly positive, skipped");
      continue;
    }

    const Eigen::MatrixXd B =
        N.cast<double>() * flux.asDiagonal() * Y.cast<double>().transpose();
    const double ctol = default_classify_tol(B);
    bool stable;
    if (rank_aware) {
      const RankAwareCounts counts = rank_aware_counts(B, rank, ctol);
      stable = counts.n_neg_of_r == rank;
    } else {
      stable = classify(B, ctol).stable();
    }
    if (!stable) {
      out.diagnostics.push_back("sample " + std::to_string(sample) +
                                ": B(j) not stable");
      continue;
    }

    const auto witness = d_instability_search(
        B, opts.budget, opts.seed + 1000003ULL * (sample + 1), opts.parallel);
    if (!witness) {
      out.diagnostics.push_back("sample " + std::to_string(sample) +
                                ": no D-instability witness within budget");
      continue;
    }

    // B diag(d) = G(d, j), so the witness diagonal is the unstable endpoint.
    const Eigen::VectorXd h_s = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd h_u = witness->d;
    HopfCurve curve;
    try {
      curve = hopf_scan(N, Y, E, jbar, h_s, h_u, opts.grid, opts.tol, rank);
    } catch (const std::exception& e) {
      out.diagnostics.push_back("sample " + std::to_string(sample) +
                                ": curve scan failed: " + e.what());
      continue;
    }

    Criterion2Witness w;
    w.jbar = jbar;
    w.rbar = flux;
    w.h_s = h_s;
    w.h_u = h_u;
    w.crossing_beta = curve.crossing_beta;
    w.h_at_crossing = curve_point(h_s, h_u, curve.crossing_beta);
    auto [a, ss] = realize_system(net, E, {w.h_at_crossing, jbar});
    w.a = std::move(a);
    w.xbar = ss.x;
    w.report_at_crossing = curve.report_at_crossing;
    w.rank_aware = rank_aware;
    w.rank = rank;
    out.diagnostics.push_back(
        "sample " + std::to_string(sample) + ": certified, crossing at beta = " +
        std::to_string(curve.crossing_beta) +
        (curve.extra_brackets.empty()
             ? ""
             : " (" + std::to_string(curve.extra_brackets.size()) +
                   " further unrefined bracket(s))"));
    out.verdict = Verdict::Certified;
    out.witness2 = std::move(w);
    return out;
  }

  out.verdict = Verdict::Inconclusive;
  out.diagnostics.push_back("no sample produced a stable but D-unstable B(j)");
  return out;
}

}  // namespace

CriterionOutcome criterion2_search(const Network& net,
                                   const Criterion2Options& opts) {
  return criterion2_impl(net, opts, false);
}

CriterionOutcome criterion2_rank_aware(const Network& net,
                                       const Criterion2Options& opts) {
  return criterion2_impl(net, opts, true);
}

}  // namespace hopfnet
