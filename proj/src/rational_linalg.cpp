#include "hopfnet/rational_linalg.hpp"

#include <numeric>

namespace hopfnet {

namespace {

using boost::multiprecision::cpp_int;

// Scale to coprime integer entries with positive leading nonzero.
void canonicalize(RationalVector& v) {
  cpp_int lcm_den = 1;
  for (const auto& q : v)
    lcm_den = boost::multiprecision::lcm(lcm_den, denominator(q));
  cpp_int gcd_num = 0;
  for (auto& q : v) {
    q *= lcm_den;
    gcd_num = boost::multiprecision::gcd(gcd_num, numerator(q));
  }
  if (gcd_num == 0) return;
  int lead_sign = 1;
  for (const auto& q : v) {
    if (q != 0) {
      lead_sign = q < 0 ? -1 : 1;
      break;
    }
  }
  for (auto& q : v) q /= Rational(lead_sign * gcd_num);
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RationalMatrix& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[r], m[pivot]);
    const Rational p = m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

RationalMatrix transpose(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix t(m[0].size(), RationalVector(m.size()));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
  return t;
}

}  // namespace

RationalMatrix to_rational(const Eigen::MatrixXi& m) {
  RationalMatrix r(m.rows(), RationalVector(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

Eigen::VectorXd to_double(const RationalVector& v) {
  Eigen::VectorXd d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = v[i].convert_to<double>();
  return d;
}

int rational_rank(RationalMatrix m) {
  return static_cast<int>(rref(m).size());
}

std::vector<RationalVector> nullspace(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix work = m;
  const std::vector<int> pivots = rref(work);
  const int cols = static_cast<int>(m[0].size());
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivots) is_pivot[c] = true;

  std::vector<RationalVector> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(cols, Rational(0));
    v[free] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -work[r][free];
    canonicalize(v);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<RationalVector> left_nullspace(const RationalMatrix& m) {
  return nullspace(transpose(m));
}

}  // namespace hopfnet
