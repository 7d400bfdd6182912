#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopfnet/dynamics.hpp"
#include "hopfnet/fluxcone.hpp"
#include "hopfnet/network.hpp"
#include "hopfnet/spectral.hpp"

namespace hopfnet {

/// The SNA parameter pair: h = reciprocal steady-state concentrations,
/// j = extreme-ray weights with E j > 0.
struct ConvexCoordinates {
  Eigen::VectorXd h;
  Eigen::VectorXd j;
};

/// G(h, j) = N diag(E j) Y^T diag(h).
Eigen::MatrixXd convex_jacobian(const Eigen::MatrixXi& N,
                                const Eigen::MatrixXi& Y,
                                const ExtremeRayMatrix& E,
                                const ConvexCoordinates& coords);

/// Rate constants and steady state realizing the coordinates:
/// xbar = 1/h, rbar = E j, a fitted so rate_vector(net, a, xbar) = rbar.
std::pair<RateConstants, SteadyState> realize_system(
    const Network& net, const ExtremeRayMatrix& E,
    const ConvexCoordinates& coords);

enum class Verdict { Certified, Inconclusive, HypothesesFailed };

std::string to_string(Verdict v);

struct Criterion1Witness {
  Eigen::VectorXd xbar;
  double beta_star = 0.0;
  Eigen::VectorXd F;  // beta* xbar
  Eigen::VectorXd D;  // beta* ones
  SpectralReport report_at_beta_star;
  bool strengthened = false;
  RateConstants a;  // the rates realizing the steady state, echoed for re-verification
};

struct Criterion2Witness {
  Eigen::VectorXd jbar;
  Eigen::VectorXd rbar;  // E jbar, the steady-state flux
  Eigen::VectorXd h_s;   // stable endpoint, all ones
  Eigen::VectorXd h_u;  // destabilizing diagonal reused as endpoint
  double crossing_beta = 0.0;
  Eigen::VectorXd h_at_crossing;
  RateConstants a;              // realized rate constants at the crossing
  Eigen::VectorXd xbar;         // 1 / h_at_crossing
  SpectralReport report_at_crossing;
  bool rank_aware = false;
  int rank = 0;
};

struct CriterionOutcome {
  int criterion = 0;  // 1 or 2
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Criterion1Witness> witness1;
  std::optional<Criterion2Witness> witness2;
  std::vector<std::string> diagnostics;
};

/// Theorem-1 pipeline: checks the eigenvalue hypotheses of G(xbar), then
/// certifies the purely imaginary pair of G - beta* Id.
CriterionOutcome criterion1(const Network& net, const RateConstants& a,
                            const Eigen::VectorXd& xbar, double tol);

struct Criterion2Options {
  int samples = 50;
  int budget = 2000;       // per-sample D-instability evaluation budget
  std::uint64_t seed = 1;
  double tol = 1e-8;       // |Re(mu)| certification tolerance at crossing
  int grid = 64;           // hopf_scan grid resolution
  bool parallel = true;
};

struct CrossingBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct HopfCurve {
  Eigen::VectorXd h_s, h_u;
  std::vector<double> grid_beta;
  std::vector<SpectralReport> samples;
  double crossing_beta = 0.0;
  SpectralReport report_at_crossing;
  std::vector<CrossingBracket> extra_brackets;  // unrefined further crossings
};

/// Scans G(gamma(beta), jbar) along the entrywise log-linear curve between
/// h_s and h_u, brackets the first change in n_pos and bisects it down to
/// |Re(mu)| <= tol. Throws if no net change appears on the grid or if
/// sign det G changes between samples. rank < dimension switches the
/// stability counting to the rank-aware convention.
HopfCurve hopf_scan(const Eigen::MatrixXi& N, const Eigen::MatrixXi& Y,
                    const ExtremeRayMatrix& E, const Eigen::VectorXd& jbar,
                    const Eigen::VectorXd& h_s, const Eigen::VectorXd& h_u,
                    int grid, double tol, int rank);

/// Theorem-2 pipeline: seeded sampling of ray weights, stability plus
/// D-instability test of B(jbar), curve scan. Full-rank stability counting.
CriterionOutcome criterion2_search(const Network& net,
                                   const Criterion2Options& opts);

/// Conserved-quantity variant: stability means r eigenvalues with negative
/// real part, kernel eigenvalues excluded. Requires rank(N) < |S|.
CriterionOutcome criterion2_rank_aware(const Network& net,
                                       const Criterion2Options& opts);

}  // namespace hopfnet
