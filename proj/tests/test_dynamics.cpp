#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "corpus.hpp"
#include "hopfnet/dynamics.hpp"
#include "hopfnet/spectral.hpp"
#include "oracles.hpp"

using namespace hopfnet;

namespace {

RateConstants ones(const Network& net) {
  return {Eigen::VectorXd::Ones(net.reaction_count())};
}

}  // namespace

TEST_CASE("mass action rates are monomials") {
  SUBCASE("inflow rate is constant") {
    const Network net = parse_network("-> A");
    RateConstants a{Eigen::VectorXd::Constant(1, 3.5)};
    CHECK(rate_vector(net, a, Eigen::VectorXd::Constant(1, 0.01))[0] == 3.5);
    CHECK(rate_vector(net, a, Eigen::VectorXd::Constant(1, 99.0))[0] == 3.5);
  }
  SUBCASE("bimolecular") {
    const Network net = parse_network("A + B -> C");
    RateConstants a{Eigen::VectorXd::Constant(1, 2.0)};
    Eigen::VectorXd x(3);
    x << 3, 4, 7;
    CHECK(rate_vector(net, a, x)[0] == doctest::Approx(24.0));
  }
  SUBCASE("squared reactant") {
    const Network net = parse_network("2 X -> Y");
    Eigen::VectorXd x(2);
    x << 5, 1;
    CHECK(rate_vector(net, ones(net), x)[0] == doctest::Approx(25.0));
  }
  SUBCASE("nonpositive concentration rejected") {
    const Network net = parse_network("A -> B");
    Eigen::VectorXd x(2);
    x << 1, 0;
    CHECK_THROWS_AS(rate_vector(net, ones(net), x), std::domain_error);
  }
}

TEST_CASE("rhs is N times the rate vector") {
  const Network net = parse_network("A -> B");
  Eigen::VectorXd x(2);
  x << 2, 7;
  const Eigen::VectorXd f = rhs(net, ones(net), x);
  CHECK(f[0] == doctest::Approx(-2.0));
  CHECK(f[1] == doctest::Approx(2.0));
}

TEST_CASE("Brusselator rhs matches its textbook form") {
  const Network net = parse_network(corpus::kBrusselator);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const double b = 0.5 + 3.0 * (rng() % 1000) / 1000.0;
    RateConstants a{(Eigen::VectorXd(4) << 1, b, 1, 1).finished()};
    const Eigen::VectorXd x = oracles::random_positive(rng, 2);
    const Eigen::VectorXd f = rhs(net, a, x);
    CHECK(f[0] == doctest::Approx(1 - (b + 1) * x[0] + x[0] * x[0] * x[1]));
    CHECK(f[1] == doctest::Approx(b * x[0] - x[0] * x[0] * x[1]));
  }
}

TEST_CASE("analytic Jacobian") {
  SUBCASE("single linear conversion") {
    const Network net = parse_network("A -> B");
    RateConstants a{Eigen::VectorXd::Constant(1, 1.7)};
    const Eigen::MatrixXd G = jacobian(net, a, Eigen::Vector2d(2.0, 3.0));
    CHECK(G(0, 0) == doctest::Approx(-1.7));
    CHECK(G(1, 0) == doctest::Approx(1.7));
    CHECK(G(0, 1) == doctest::Approx(0.0));
    CHECK(G(1, 1) == doctest::Approx(0.0));
  }
  SUBCASE("inflow columns contribute nothing") {
    const Network net = parse_network("-> A");
    CHECK(jacobian(net, ones(net), Eigen::VectorXd::Constant(1, 2.0)).isZero());
  }
  SUBCASE("matches central finite differences on random instances") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 25; ++trial) {
      const Network net = oracles::random_network(rng);
      RateConstants a{oracles::random_positive(rng, net.reaction_count(), 0.2, 3.0)};
      const Eigen::VectorXd x = oracles::random_positive(rng, net.species_count());
      const Eigen::MatrixXd G = jacobian(net, a, x);
      const Eigen::MatrixXd F = oracles::fd_jacobian(net, a, x);
      const double scale = std::max(1.0, G.lpNorm<Eigen::Infinity>());
      CHECK((G - F).lpNorm<Eigen::Infinity>() / scale <= 1e-5);
    }
  }
}

TEST_CASE("open system") {
  const Network net = parse_network(corpus::kBrusselator);
  RateConstants a{(Eigen::VectorXd(4) << 1, 3, 1, 1).finished()};
  const Eigen::VectorXd xbar = (Eigen::VectorXd(2) << 1.0, 3.0).finished();
  REQUIRE(residual_norm(net, a, xbar) <= 1e-14);

  SUBCASE("steady state persists for every beta when F = beta xbar") {
    for (double beta : {1e-3, 0.1, 0.5, 1.0, 10.0, 1e3}) {
      OpenParameters open{beta * xbar, Eigen::VectorXd::Constant(2, beta)};
      const double scale =
          std::max(1.0, rhs(net, a, xbar).lpNorm<Eigen::Infinity>());
      CHECK(open_rhs(net, a, open, xbar).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
    }
  }

  SUBCASE("existing inflow combines additively with F") {
    const Network in_only = parse_network("-> A");
    RateConstants ain{Eigen::VectorXd::Constant(1, 2.0)};
    OpenParameters open{Eigen::VectorXd::Constant(1, 0.5),
                        Eigen::VectorXd::Constant(1, 1.5)};
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 4.0);
    CHECK(open_rhs(in_only, ain, open, x)[0] == doctest::Approx(2.0 + 0.5 - 1.5 * 4.0));
  }

  SUBCASE("D must be positive") {
    OpenParameters open{xbar, Eigen::VectorXd::Zero(2)};
    CHECK_THROWS_AS(open_rhs(net, a, open, xbar), std::domain_error);
  }

  SUBCASE("uniform D shifts the spectrum exactly") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const Network rnet = oracles::random_network(rng);
      RateConstants ra{oracles::random_positive(rng, rnet.reaction_count())};
      const Eigen::VectorXd x = oracles::random_positive(rng, rnet.species_count());
      const double beta = 0.1 + (rng() % 100) / 10.0;
      OpenParameters open{Eigen::VectorXd::Constant(rnet.species_count(), 1.0),
                          Eigen::VectorXd::Constant(rnet.species_count(), beta)};
      const Eigen::MatrixXd G = jacobian(rnet, ra, x);
      auto closed = spectrum(G);
      auto opened = spectrum(open_jacobian(rnet, ra, open, x));
      REQUIRE(closed.size() == opened.size());
      // Clustered eigenvalues are computed to roughly sqrt(eps) * |G|, so
      // the comparison tolerance scales with the matrix norm.
      const double tol = 1e-7 * std::max(1.0, G.lpNorm<Eigen::Infinity>());
      for (size_t i = 0; i < closed.size(); ++i)
        CHECK(std::abs(opened[i] - (closed[i] - beta)) <= tol);
    }
  }

  SUBCASE("non-uniform D subtracts exactly on the diagonal") {
    std::mt19937_64 rng(24);
    OpenParameters open{oracles::random_positive(rng, 2),
                        oracles::random_positive(rng, 2)};
    const Eigen::MatrixXd G = jacobian(net, a, xbar);
    Eigen::MatrixXd expected = G;
    expected.diagonal() -= open.D;
    CHECK((open_jacobian(net, a, open, xbar) - expected).norm() == 0.0);
  }
}

TEST_CASE("fit_rate_constants inverts the monomials") {
  SUBCASE("all-ones steady state") {
    const Network net = parse_network(corpus::kCycle);
    const Eigen::VectorXd rbar = (Eigen::VectorXd(3) << 2, 3, 4).finished();
    const RateConstants a =
        fit_rate_constants(net, Eigen::VectorXd::Ones(3), rbar);
    CHECK((a.a - rbar).norm() == 0.0);
  }
  SUBCASE("quadratic reactant") {
    const Network net = parse_network("2 X -> Y");
    Eigen::VectorXd xbar(2);
    xbar << 2, 1;
    const RateConstants a =
        fit_rate_constants(net, xbar, Eigen::VectorXd::Constant(1, 8.0));
    CHECK(a.a[0] == doctest::Approx(2.0));
  }
  SUBCASE("round trip to relative 1e-14") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 30; ++trial) {
      const Network net = oracles::random_network(rng);
      const Eigen::VectorXd xbar = oracles::random_positive(rng, net.species_count());
      const Eigen::VectorXd rbar =
          oracles::random_positive(rng, net.reaction_count(), 0.1, 10.0);
      const Eigen::VectorXd back =
          rate_vector(net, fit_rate_constants(net, xbar, rbar), xbar);
      CHECK(((back - rbar).cwiseQuotient(rbar)).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
  }
}

TEST_CASE("residual_norm") {
  const Network net = parse_network(corpus::kBrusselator);
  RateConstants a{(Eigen::VectorXd(4) << 1, 3, 1, 1).finished()};
  const Eigen::VectorXd xbar = (Eigen::VectorXd(2) << 1.0, 3.0).finished();
  CHECK(residual_norm(net, a, xbar) <= 1e-14);
  CHECK(residual_norm(net, a, xbar * 1.01) > 0.0);

  const Network conv = parse_network("A -> B");
  RateConstants ca{Eigen::VectorXd::Constant(1, 2.0)};
  CHECK(residual_norm(conv, ca, Eigen::Vector2d(3.0, 1.0)) == doctest::Approx(6.0));
}
