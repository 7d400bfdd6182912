#include "hopfnet/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace hopfnet {

namespace {

void require_positive(const Eigen::VectorXd& x, const char* what) {
  for (int n = 0; n < x.size(); ++n)
    if (!(x[n] > 0.0)) throw std::domain_error(std::string(what) + " must be entrywise positive");
}

// Monomials go through log space once an exponent is large; they are exactly
// linear there and cannot overflow prematurely.
constexpr int kLogSpaceExponent = 8;

double monomial(const Eigen::MatrixXi& Y, int reaction, const Eigen::VectorXd& x) {
  int max_exp = 0;
  for (int n = 0; n < x.size(); ++n) max_exp = std::max(max_exp, Y(n, reaction));
  if (max_exp > kLogSpaceExponent) {
    double log_m = 0.0;
    for (int n = 0; n < x.size(); ++n)
      if (Y(n, reaction) != 0) log_m += Y(n, reaction) * std::log(x[n]);
    return std::exp(log_m);
  }
  double m = 1.0;
  for (int n = 0; n < x.size(); ++n)
    for (int k = 0; k < Y(n, reaction); ++k) m *= x[n];
  return m;
}

}  // namespace

Eigen::VectorXd rate_vector(const Network& net, const RateConstants& a,
                            const Eigen::VectorXd& x) {
  require_positive(x, "concentration");
  if (a.a.size() != net.reaction_count())
    throw std::invalid_argument("rate constant count mismatch");
  const Eigen::MatrixXi Y = kinetic_matrix(net);
  Eigen::VectorXd r(net.reaction_count());
  for (int i = 0; i < net.reaction_count(); ++i) r[i] = a.a[i] * monomial(Y, i, x);
  return r;
}

Eigen::VectorXd rhs(const Network& net, const RateConstants& a,
                    const Eigen::VectorXd& x) {
  return stoichiometric_matrix(net).cast<double>() * rate_vector(net, a, x);
}

Eigen::MatrixXd jacobian(const Network& net, const RateConstants& a,
                         const Eigen::VectorXd& x) {
  require_positive(x, "concentration");
  const Eigen::VectorXd r = rate_vector(net, a, x);
  const Eigen::MatrixXd N = stoichiometric_matrix(net).cast<double>();
  const Eigen::MatrixXd Y = kinetic_matrix(net).cast<double>();
  return N * r.asDiagonal() * Y.transpose() * x.cwiseInverse().asDiagonal();
}

Eigen::VectorXd open_rhs(const Network& net, const RateConstants& a,
                         const OpenParameters& open, const Eigen::VectorXd& x) {
  require_positive(open.F, "inflow F");
  require_positive(open.D, "outflow D");
  return rhs(net, a, x) + open.F - open.D.cwiseProduct(x);
}

Eigen::MatrixXd open_jacobian(const Network& net, const RateConstants& a,
                              const OpenParameters& open,
                              const Eigen::VectorXd& x) {
  require_positive(open.F, "inflow F");
  require_positive(open.D, "outflow D");
  Eigen::MatrixXd G = jacobian(net, a, x);
  G.diagonal() -= open.D;
  return G;
}

RateConstants fit_rate_constants(const Network& net, const Eigen::VectorXd& xbar,
                                 const Eigen::VectorXd& rbar) {
  require_positive(xbar, "steady state");
  require_positive(rbar, "flux");
  if (rbar.size() != net.reaction_count())
    throw std::invalid_argument("flux size mismatch");
  const Eigen::MatrixXi Y = kinetic_matrix(net);
  RateConstants a;
  a.a.resize(net.reaction_count());
  for (int i = 0; i < net.reaction_count(); ++i)
    a.a[i] = rbar[i] / monomial(Y, i, xbar);
  return a;
}

double residual_norm(const Network& net, const RateConstants& a,
                     const Eigen::VectorXd& x) {
  return rhs(net, a, x).lpNorm<Eigen::Infinity>();
}

}  // namespace hopfnet
