#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hopfnet {

struct DominantInfo {
  std::complex<double> value;
  bool simple = false;            // no repeated eigenvalue at the value
  bool strictly_dominant = false; // no other real part within tol of the max
};

struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted (desc re, asc im)
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;
  double tol = 0.0;
  std::optional<DominantInfo> dominant;

  bool stable() const { return n_neg == static_cast<int>(eigenvalues.size()); }
};

/// All eigenvalues of a real square matrix, sorted (descending real part,
/// ascending imaginary part).
std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& A);

/// Default classification tolerance, 1e-9 * max(1, |A|_inf).
double default_classify_tol(const Eigen::MatrixXd& A);

SpectralReport classify(const Eigen::MatrixXd& A, double tol);

struct Theorem1Check {
  bool holds = false;
  std::complex<double> pair{0, 0};  // the eigenvalue with positive imag part
  bool strengthened = false;        // pair strictly dominates all others
};

/// True iff the set of eigenvalues of maximal real part (within tol) is
/// exactly one simple complex-conjugate pair with positive real part.
Theorem1Check theorem1_hypotheses(const Eigen::MatrixXd& A, double tol);

struct MinorWitness {
  std::vector<int> indices;  // 0-based principal index set
  double value;
};

struct P0MinusResult {
  bool is_p0_minus = true;
  std::optional<MinorWitness> violating_minor;
};

/// Checks sign (-1)^k on every nonzero k-principal minor. Dimension capped
/// (2^n minors).
P0MinusResult is_p0_minus(const Eigen::MatrixXd& A, int dimension_cap = 12,
                          double zero_tol = 1e-11);

struct DiagonalWitness {
  Eigen::VectorXd d;  // entrywise > 0
  SpectralReport report_before;  // of A
  SpectralReport report_after;   // of A diag(d), recomputed independently
};

/// Searches for positive diagonal d with spectral abscissa of A diag(d)
/// above zero. Tries an analytic construction from a small P0^- violation
/// first, then seeded multistart coordinate ascent over log d in [-6, 6].
/// Deterministic for fixed (A, budget, seed) whether or not the multistart
/// runs its starts in parallel. Empty result means inconclusive, never a
/// stability proof.
std::optional<DiagonalWitness> d_instability_search(const Eigen::MatrixXd& A,
                                                    int budget,
                                                    std::uint64_t seed,
                                                    bool parallel = true);

struct StabilityChange {
  bool differs = false;
  std::pair<int, int> counts{0, 0};  // n_pos of A diag(d1), A diag(d2)
};

/// Throws if either product is non-hyperbolic at the given tolerance.
StabilityChange net_stability_change(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& d1,
                                     const Eigen::VectorXd& d2, double tol);

struct RankAwareCounts {
  int n_neg_of_r = 0;
  int n_pos_of_r = 0;
  int kernel_dim = 0;
};

/// Stability counts among the r nonzero eigenvalues of a matrix with
/// structural rank r; the n - r smallest-modulus eigenvalues must lie
/// within tol of zero or an exception is thrown.
RankAwareCounts rank_aware_counts(const Eigen::MatrixXd& A, int r, double tol);

}  // namespace hopfnet
