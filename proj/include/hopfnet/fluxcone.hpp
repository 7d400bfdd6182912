#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hopfnet/rational_linalg.hpp"

namespace hopfnet {

/// Extreme rays of {r >= 0 : N r = 0}, stored column-wise with exact
/// rational entries. Columns are normalized (largest entry 1) and ordered
/// lexicographically by support, then by entries. p == 0 means the cone
/// is the origin alone.
struct ExtremeRayMatrix {
  int reaction_count = 0;
  std::vector<RationalVector> columns;

  int ray_count() const { return static_cast<int>(columns.size()); }
  bool trivial() const { return columns.empty(); }
  Eigen::MatrixXd as_double() const;
};

/// Double-description enumeration in exact arithmetic. Throws if an
/// intermediate generation exceeds max_rays.
ExtremeRayMatrix extreme_rays(const Eigen::MatrixXi& N,
                              std::size_t max_rays = 100000);

/// E j for j >= 0.
Eigen::VectorXd flux_from_weights(const ExtremeRayMatrix& E,
                                  const Eigen::VectorXd& j);

enum class ConeLocation { Interior, Boundary, Outside };

struct MembershipResult {
  ConeLocation location;
  double residual;           // reconstruction residual of v ~ E j
  Eigen::VectorXd weights;   // the nonnegative least-squares j
};

/// Classifies v against the cone spanned by E via nonnegative least
/// squares: Outside if v has a negative entry or the residual exceeds
/// tol * max(1, |v|); Interior if additionally v > 0 strictly.
MembershipResult membership(const ExtremeRayMatrix& E, const Eigen::VectorXd& v,
                            double tol);

/// Lawson-Hanson nonnegative least squares, min |A x - b| over x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace hopfnet
