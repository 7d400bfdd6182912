#include "hopfnet/fluxcone.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/dynamic_bitset.hpp>

namespace hopfnet {

namespace {

using Bitset = boost::dynamic_bitset<>;

Bitset zero_set(const RationalVector& ray) {
  Bitset z(ray.size());
  for (size_t i = 0; i < ray.size(); ++i)
    if (ray[i] == 0) z.set(i);
  return z;
}

// Extreme-ray adjacency: no third ray's zero set contains the common one.
bool adjacent(const std::vector<Bitset>& zeros, size_t i, size_t j) {
  const Bitset common = zeros[i] & zeros[j];
  for (size_t k = 0; k < zeros.size(); ++k) {
    if (k == i || k == j) continue;
    if (common.is_subset_of(zeros[k])) return false;
  }
  return true;
}

void normalize_max_entry(RationalVector& ray) {
  Rational max_entry = 0;
  for (const auto& q : ray) max_entry = std::max(max_entry, q);
  if (max_entry == 0) return;
  for (auto& q : ray) q /= max_entry;
}

}  // namespace

Eigen::MatrixXd ExtremeRayMatrix::as_double() const {
  Eigen::MatrixXd E(reaction_count, ray_count());
  for (int k = 0; k < ray_count(); ++k) E.col(k) = to_double(columns[k]);
  return E;
}

ExtremeRayMatrix extreme_rays(const Eigen::MatrixXi& N, std::size_t max_rays) {
  const int n_reactions = static_cast<int>(N.cols());

  // Start from the nonnegative orthant and intersect with one equality
  // N_row . r = 0 per pass.
  std::vector<RationalVector> rays(n_reactions, RationalVector(n_reactions, Rational(0)));
  for (int i = 0; i < n_reactions; ++i) rays[i][i] = 1;

  for (int row = 0; row < N.rows(); ++row) {
    std::vector<Rational> value(rays.size());
    for (size_t k = 0; k < rays.size(); ++k) {
      Rational v = 0;
      for (int i = 0; i < n_reactions; ++i)
        if (N(row, i) != 0) v += Rational(N(row, i)) * rays[k][i];
      value[k] = v;
    }

    std::vector<Bitset> zeros(rays.size());
    for (size_t k = 0; k < rays.size(); ++k) zeros[k] = zero_set(rays[k]);

    std::vector<RationalVector> next;
    for (size_t k = 0; k < rays.size(); ++k)
      if (value[k] == 0) next.push_back(rays[k]);

    for (size_t i = 0; i < rays.size(); ++i) {
      if (value[i] <= 0) continue;
      for (size_t j = 0; j < rays.size(); ++j) {
        if (value[j] >= 0) continue;
        if (!adjacent(zeros, i, j)) continue;
        RationalVector combo(n_reactions);
        for (int c = 0; c < n_reactions; ++c)
          combo[c] = value[i] * rays[j][c] - value[j] * rays[i][c];
        next.push_back(std::move(combo));
        if (next.size() > max_rays)
          throw std::runtime_error(
              "extreme-ray enumeration exceeded the ray cap (" +
              std::to_string(max_rays) + "); the cone is too complex");
      }
    }
    rays = std::move(next);
  }

  ExtremeRayMatrix E;
  E.reaction_count = n_reactions;
  for (auto& ray : rays) normalize_max_entry(ray);

  // Deterministic order: lexicographic by support, then by entries.
  auto support_key = [n_reactions](const RationalVector& ray) {
    std::vector<int> s;
    for (int i = 0; i < n_reactions; ++i)
      if (ray[i] != 0) s.push_back(i);
    return s;
  };
  std::sort(rays.begin(), rays.end(),
            [&](const RationalVector& a, const RationalVector& b) {
              const auto sa = support_key(a), sb = support_key(b);
              if (sa != sb) return sa < sb;
              return a < b;
            });
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  E.columns = std::move(rays);
  return E;
}

Eigen::VectorXd flux_from_weights(const ExtremeRayMatrix& E,
                                  const Eigen::VectorXd& j) {
  if (j.size() != E.ray_count())
    throw std::invalid_argument("weight vector size does not match ray count");
  for (int k = 0; k < j.size(); ++k)
    if (j[k] < 0) throw std::domain_error("ray weights must be nonnegative");
  return E.as_double() * j;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, b.norm());

  for (int iter = 0; iter < 30 * n + 30; ++iter) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double best_w = tol;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    if (best < 0) break;
    passive[best] = true;

    // Inner loop: solve on the passive set, clip negatives back out.
    while (true) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
      Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);

      double alpha = 1.0;
      for (size_t c = 0; c < idx.size(); ++c)
        if (z[c] <= 0) alpha = std::min(alpha, x[idx[c]] / (x[idx[c]] - z[c]));
      Eigen::VectorXd xnew = Eigen::VectorXd::Zero(n);
      for (size_t c = 0; c < idx.size(); ++c)
        xnew[idx[c]] = x[idx[c]] + alpha * (z[c] - x[idx[c]]);
      x = xnew;
      if (alpha == 1.0) break;
      for (int i = 0; i < n; ++i)
        if (passive[i] && x[i] <= tol) {
          passive[i] = false;
          x[i] = 0.0;
        }
    }
  }
  return x;
}

MembershipResult membership(const ExtremeRayMatrix& E, const Eigen::VectorXd& v,
                            double tol) {
  if (v.size() != E.reaction_count)
    throw std::invalid_argument("flux vector size mismatch");
  MembershipResult res;
  const double scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
  if (E.trivial()) {
    res.weights = Eigen::VectorXd();
    res.residual = v.norm();
    res.location = res.residual <= tol * scale ? ConeLocation::Boundary
                                               : ConeLocation::Outside;
    return res;
  }
  if (v.minCoeff() < -tol * scale) {
    res.weights = Eigen::VectorXd::Zero(E.ray_count());
    res.residual = v.norm();
    res.location = ConeLocation::Outside;
    return res;
  }
  const Eigen::MatrixXd A = E.as_double();
  res.weights = nnls(A, v);
  res.residual = (A * res.weights - v).norm();
  if (res.residual > tol * scale)
    res.location = ConeLocation::Outside;
  else if (v.minCoeff() > tol * scale)
    res.location = ConeLocation::Interior;
  else
    res.location = ConeLocation::Boundary;
  return res;
}

}  // namespace hopfnet
