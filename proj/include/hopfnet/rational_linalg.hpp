#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

namespace hopfnet {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major

RationalMatrix to_rational(const Eigen::MatrixXi& m);
Eigen::VectorXd to_double(const RationalVector& v);

/// Rank by exact Gaussian elimination.
int rational_rank(RationalMatrix m);

/// Basis of {x : M x = 0}, exact. Vectors scaled to integer entries with
/// no common factor and positive leading entry.
std::vector<RationalVector> nullspace(const RationalMatrix& m);

/// Basis of {y : y M = 0} (left kernel), same scaling convention.
std::vector<RationalVector> left_nullspace(const RationalMatrix& m);

}  // namespace hopfnet
