#pragma once

#include <Eigen/Dense>

#include "hopfnet/network.hpp"

namespace hopfnet {

struct RateConstants {
  Eigen::VectorXd a;  // one positive entry per reaction
};

/// Constant inflow F and linear outflow diag(D) appended to a closed system.
struct OpenParameters {
  Eigen::VectorXd F;  // entrywise > 0
  Eigen::VectorXd D;  // entrywise > 0, diagonal of the outflow matrix
};

struct SteadyState {
  Eigen::VectorXd x;  // entrywise > 0
  double residual = 0.0;
};

/// r_i = a_i * prod_n x_n^Y(n,i). Requires x > 0.
Eigen::VectorXd rate_vector(const Network& net, const RateConstants& a,
                            const Eigen::VectorXd& x);

/// N r(x).
Eigen::VectorXd rhs(const Network& net, const RateConstants& a,
                    const Eigen::VectorXd& x);

/// Closed-form N diag(r) Y^T diag(1/x).
Eigen::MatrixXd jacobian(const Network& net, const RateConstants& a,
                         const Eigen::VectorXd& x);

/// N r(x) + F - diag(D) x.
Eigen::VectorXd open_rhs(const Network& net, const RateConstants& a,
                         const OpenParameters& open, const Eigen::VectorXd& x);

/// jacobian - diag(D).
Eigen::MatrixXd open_jacobian(const Network& net, const RateConstants& a,
                              const OpenParameters& open,
                              const Eigen::VectorXd& x);

/// a_i = rbar_i / prod_n xbar_n^Y(n,i), so rate_vector(net, a, xbar) == rbar.
RateConstants fit_rate_constants(const Network& net,
                                 const Eigen::VectorXd& xbar,
                                 const Eigen::VectorXd& rbar);

/// Max-norm of rhs.
double residual_norm(const Network& net, const RateConstants& a,
                     const Eigen::VectorXd& x);

}  // namespace hopfnet
