#include "hopfnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include <omp.h>

namespace hopfnet {

namespace {

void require_finite_square(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix must be square");
  if (!A.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

// Simplicity test distance between eigenvalues.
double pairing_tol(const Eigen::MatrixXd& A) {
  return 1e-7 * std::max(1.0, A.lpNorm<Eigen::Infinity>());
}

double spectral_abscissa(const Eigen::MatrixXd& A) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
  return ev.real().maxCoeff();
}

int search_threads() {
  if (const char* env = std::getenv("HOPFNET_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return omp_get_max_threads();
}

}  // namespace

std::vector<std::complex<double>> spectrum(const Eigen::MatrixXd& A) {
  require_finite_square(A);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue iteration failed to converge");
  std::vector<std::complex<double>> ev(A.rows());
  for (int i = 0; i < A.rows(); ++i) ev[i] = solver.eigenvalues()[i];
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

double default_classify_tol(const Eigen::MatrixXd& A) {
  return 1e-9 * std::max(1.0, A.lpNorm<Eigen::Infinity>());
}

SpectralReport classify(const Eigen::MatrixXd& A, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("classification tolerance must be positive");
  SpectralReport rep;
  rep.eigenvalues = spectrum(A);
  rep.tol = tol;
  for (const auto& ev : rep.eigenvalues) {
    if (ev.real() > tol)
      ++rep.n_pos;
    else if (ev.real() < -tol)
      ++rep.n_neg;
    else
      ++rep.n_zero;
  }
  if (!rep.eigenvalues.empty()) {
    const double ptol = pairing_tol(A);
    // Sorted order puts a maximal-real-part eigenvalue first; within the
    // leading conjugate pair prefer the positive-imaginary member.
    DominantInfo dom;
    dom.value = rep.eigenvalues.front();
    for (const auto& ev : rep.eigenvalues)
      if (std::abs(ev.real() - dom.value.real()) <= ptol && ev.imag() > dom.value.imag())
        dom.value = ev;
    int multiplicity = 0;
    bool others_below = true;
    for (const auto& ev : rep.eigenvalues) {
      if (std::abs(ev - dom.value) <= ptol) ++multiplicity;
      const bool is_pair = std::abs(ev - dom.value) <= ptol ||
                           std::abs(ev - std::conj(dom.value)) <= ptol;
      if (!is_pair && ev.real() > dom.value.real() - tol) others_below = false;
    }
    dom.simple = multiplicity == 1;
    dom.strictly_dominant = others_below;
    rep.dominant = dom;
  }
  return rep;
}

Theorem1Check theorem1_hypotheses(const Eigen::MatrixXd& A, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const auto ev = spectrum(A);
  const double ptol = pairing_tol(A);
  Theorem1Check check;

  // Candidates in descending real part, so the accepted pair is the most
  // dominant qualifying one.
  for (const auto& lambda : ev) {
    if (lambda.imag() <= tol || lambda.real() <= tol) continue;

    int at_value = 0, at_conj = 0;
    bool other_at_same_real = false;
    for (const auto& mu : ev) {
      if (std::abs(mu - lambda) <= ptol) {
        ++at_value;
        continue;
      }
      if (std::abs(mu - std::conj(lambda)) <= ptol) {
        ++at_conj;
        continue;
      }
      if (std::abs(mu.real() - lambda.real()) <= tol) other_at_same_real = true;
    }
    if (at_value != 1 || at_conj != 1 || other_at_same_real) continue;

    check.holds = true;
    check.pair = lambda;
    check.strengthened = true;
    for (const auto& mu : ev) {
      if (std::abs(mu - lambda) <= ptol || std::abs(mu - std::conj(lambda)) <= ptol)
        continue;
      if (mu.real() > lambda.real() - tol) check.strengthened = false;
    }
    return check;
  }
  return check;
}

P0MinusResult is_p0_minus(const Eigen::MatrixXd& A, int dimension_cap,
                          double zero_tol) {
  require_finite_square(A);
  const int n = static_cast<int>(A.rows());
  if (n > dimension_cap)
    throw std::invalid_argument("dimension exceeds the principal-minor cap of " +
                                std::to_string(dimension_cap));
  const double scale = std::max(1.0, A.lpNorm<Eigen::Infinity>());

  P0MinusResult res;
  for (int k = 1; k <= n && res.is_p0_minus; ++k) {
    // Subsets of size k in lexicographic index order.
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      Eigen::MatrixXd sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = A(idx[i], idx[j]);
      const double det = sub.fullPivLu().determinant();
      const double zero_band = zero_tol * std::pow(scale, k);
      if (std::abs(det) > zero_band && ((k % 2 == 0) ? det < 0 : det > 0)) {
        res.is_p0_minus = false;
        res.violating_minor = MinorWitness{idx, det};
        break;
      }
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return res;
}

namespace {

constexpr double kLogLo = -6.0, kLogHi = 6.0;

Eigen::VectorXd exp_vec(const Eigen::VectorXd& logd) {
  return logd.array().exp().matrix();
}

// Derivative-free coordinate ascent on the spectral abscissa of A diag(d),
// log d clamped to [kLogLo, kLogHi] (natural-log bounds on the entries are
// not meaningful; the box is in base-10 per the search contract).
struct AscentResult {
  Eigen::VectorXd logd;
  double abscissa = 0.0;
};

AscentResult coordinate_ascent(const Eigen::MatrixXd& A, Eigen::VectorXd logd,
                               int max_evals) {
  const int n = static_cast<int>(logd.size());
  const double ln10 = std::log(10.0);
  auto eval = [&](const Eigen::VectorXd& ld) {
    return spectral_abscissa(A * exp_vec(ld * ln10).asDiagonal());
  };
  int evals = 0;
  double best = eval(logd);
  ++evals;
  double step = 1.0;
  while (evals < max_evals && best <= 0 && step > 1e-3) {
    bool improved = false;
    for (int c = 0; c < n && evals < max_evals; ++c) {
      for (double dir : {+1.0, -1.0}) {
        Eigen::VectorXd trial = logd;
        trial[c] = std::clamp(trial[c] + dir * step, kLogLo, kLogHi);
        if (trial[c] == logd[c]) continue;
        const double v = eval(trial);
        ++evals;
        if (v > best) {
          best = v;
          logd = trial;
          improved = true;
          break;
        }
      }
      if (best > 0) break;
    }
    if (!improved) step *= 0.5;
  }
  return {logd, best};
}

}  // namespace

std::optional<DiagonalWitness> d_instability_search(const Eigen::MatrixXd& A,
                                                    int budget,
                                                    std::uint64_t seed,
                                                    bool parallel) {
  require_finite_square(A);
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  const int n = static_cast<int>(A.rows());
  const double tol = default_classify_tol(A);

  auto make_witness = [&](const Eigen::VectorXd& d) -> std::optional<DiagonalWitness> {
    // Verification recomputes the product spectrum from scratch.
    SpectralReport after = classify(A * d.asDiagonal(), tol);
    if (after.n_pos < 1) return std::nullopt;
    DiagonalWitness w;
    w.d = d;
    w.report_before = classify(A, tol);
    w.report_after = std::move(after);
    return w;
  };

  // Analytic route: a small P0^- violation pins down which diagonal entries
  // to load. A positive 1x1 minor makes it a trace argument.
  try {
    const P0MinusResult p0 = is_p0_minus(A);
    if (!p0.is_p0_minus && p0.violating_minor &&
        p0.violating_minor->indices.size() <= 3) {
      for (double heavy : {1e6, 1e4, 1e2}) {
        Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1e-6);
        for (int i : p0.violating_minor->indices) d[i] = heavy;
        if (auto w = make_witness(d)) return w;
      }
    }
  } catch (const std::invalid_argument&) {
    // Dimension above the minor cap: straight to the multistart.
  }

  // Seeded multistart, lowest successful start index wins regardless of
  // scheduling.
  const int evals_per_start = 60;
  const int n_starts = std::max(1, budget / evals_per_start);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(kLogLo, kLogHi);
  std::vector<Eigen::VectorXd> starts(n_starts);
  for (auto& s : starts) {
    s.resize(n);
    for (int c = 0; c < n; ++c) s[c] = uni(rng);
  }
  starts[0].setZero();  // always probe d = 1

  std::vector<char> success(n_starts, 0);
  std::vector<Eigen::VectorXd> found(n_starts);
  const int threads = parallel ? search_threads() : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int s = 0; s < n_starts; ++s) {
    AscentResult res = coordinate_ascent(A, starts[s], evals_per_start);
    if (res.abscissa > tol) {
      found[s] = exp_vec(res.logd * std::log(10.0));
      success[s] = 1;
    }
  }
  for (int s = 0; s < n_starts; ++s)
    if (success[s])
      if (auto w = make_witness(found[s])) return w;
  return std::nullopt;
}

StabilityChange net_stability_change(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& d1,
                                     const Eigen::VectorXd& d2, double tol) {
  for (const auto* d : {&d1, &d2})
    for (int i = 0; i < d->size(); ++i)
      if (!((*d)[i] > 0)) throw std::domain_error("diagonal entries must be positive");
  const SpectralReport r1 = classify(A * d1.asDiagonal(), tol);
  const SpectralReport r2 = classify(A * d2.asDiagonal(), tol);
  if (r1.n_zero > 0 || r2.n_zero > 0)
    throw std::runtime_error("non-hyperbolic endpoint; perturb the diagonal");
  return {r1.n_pos != r2.n_pos, {r1.n_pos, r2.n_pos}};
}

RankAwareCounts rank_aware_counts(const Eigen::MatrixXd& A, int r, double tol) {
  require_finite_square(A);
  const int n = static_cast<int>(A.rows());
  if (r < 0 || r > n) throw std::invalid_argument("rank out of range");
  std::vector<std::complex<double>> ev = spectrum(A);
  std::sort(ev.begin(), ev.end(),
            [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
  const double scale = std::max(1.0, A.lpNorm<Eigen::Infinity>());
  RankAwareCounts counts;
  counts.kernel_dim = n - r;
  for (int i = 0; i < n - r; ++i)
    if (std::abs(ev[i]) > tol * scale)
      throw std::runtime_error(
          "numerical rank disagrees with the structural rank: eigenvalue of "
          "modulus " + std::to_string(std::abs(ev[i])) + " in the kernel block");
  for (int i = n - r; i < n; ++i) {
    if (ev[i].real() > tol)
      ++counts.n_pos_of_r;
    else if (ev[i].real() < -tol)
      ++counts.n_neg_of_r;
  }
  return counts;
}

}  // namespace hopfnet
