#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "corpus.hpp"
#include "hopfnet/fluxcone.hpp"
#include "hopfnet/network.hpp"
#include "oracles.hpp"

using namespace hopfnet;

namespace {

ExtremeRayMatrix rays_of(const char* text) {
  return extreme_rays(stoichiometric_matrix(parse_network(text)));
}

}  // namespace

TEST_CASE("simple cones") {
  SUBCASE("three-cycle has the all-ones ray") {
    const ExtremeRayMatrix E = rays_of(corpus::kCycle);
    REQUIRE(E.ray_count() == 1);
    CHECK(E.columns[0] == RationalVector{1, 1, 1});
  }
  SUBCASE("reversible pair forces equal fluxes") {
    const ExtremeRayMatrix E = rays_of(corpus::kReversiblePair);
    REQUIRE(E.ray_count() == 1);
    CHECK(E.columns[0] == RationalVector{1, 1});
  }
  SUBCASE("four-reaction open chain has two rays") {
    const ExtremeRayMatrix E = rays_of(corpus::kFourReactionOpen);
    REQUIRE(E.ray_count() == 2);
    CHECK(E.columns[0] == RationalVector{1, 1, 1, 0});
    CHECK(E.columns[1] == RationalVector{1, 0, 0, 1});
  }
  SUBCASE("trivial cone reported as empty, not an exception") {
    const ExtremeRayMatrix E = rays_of(corpus::kSingleConversion);
    CHECK(E.trivial());
    CHECK(E.ray_count() == 0);
  }
}

TEST_CASE("exactness and support minimality") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXi N = stoichiometric_matrix(oracles::random_network(rng));
    const ExtremeRayMatrix E = extreme_rays(N);
    for (const auto& col : E.columns) {
      // N E_k = 0 in rational arithmetic, zero tolerance.
      for (int r = 0; r < N.rows(); ++r) {
        Rational dot = 0;
        for (int i = 0; i < N.cols(); ++i) dot += Rational(N(r, i)) * col[i];
        CHECK(dot == 0);
      }
    }
    // No support strictly contains another.
    for (int k = 0; k < E.ray_count(); ++k)
      for (int l = 0; l < E.ray_count(); ++l) {
        if (k == l) continue;
        std::set<int> sk, sl;
        for (int i = 0; i < N.cols(); ++i) {
          if (E.columns[k][i] != 0) sk.insert(i);
          if (E.columns[l][i] != 0) sl.insert(i);
        }
        const bool contains =
            std::includes(sk.begin(), sk.end(), sl.begin(), sl.end());
        CHECK((!contains || sk == sl));
      }
  }
}

TEST_CASE("agreement with the brute-force support oracle") {
  auto check_network = [](const Eigen::MatrixXi& N) {
    const ExtremeRayMatrix E = extreme_rays(N);
    auto expected = oracles::brute_force_rays(N);
    auto actual = E.columns;
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    CHECK(actual == expected);
  };
  for (const char* text : corpus::kAll) {
    const Eigen::MatrixXi N = stoichiometric_matrix(parse_network(text));
    if (N.cols() <= 8) check_network(N);
  }
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::MatrixXi N =
        stoichiometric_matrix(oracles::random_network(rng, 4, 6));
    if (N.cols() <= 8) check_network(N);
  }
}

TEST_CASE("flux_from_weights") {
  const ExtremeRayMatrix E = rays_of(corpus::kFourReactionOpen);
  SUBCASE("unit weights select columns") {
    const Eigen::VectorXd v = flux_from_weights(E, Eigen::Vector2d(1.0, 0.0));
    CHECK((v - to_double(E.columns[0])).norm() == 0.0);
  }
  SUBCASE("zero weights give the zero flux") {
    CHECK(flux_from_weights(E, Eigen::Vector2d::Zero()).isZero());
  }
  SUBCASE("positive weights cover all reactions here") {
    std::mt19937_64 rng(33);
    const Eigen::VectorXd j = oracles::random_positive(rng, 2, 0.1, 5.0);
    CHECK(flux_from_weights(E, j).minCoeff() > 0.0);
  }
  SUBCASE("negative weights rejected") {
    CHECK_THROWS_AS(flux_from_weights(E, Eigen::Vector2d(1.0, -0.5)),
                    std::domain_error);
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(flux_from_weights(E, Eigen::Vector3d::Ones()),
                    std::invalid_argument);
  }
}

TEST_CASE("membership classification") {
  const ExtremeRayMatrix E = rays_of(corpus::kFourReactionOpen);
  SUBCASE("a ray with zero coordinates is boundary") {
    CHECK(membership(E, to_double(E.columns[0]), 1e-10).location ==
          ConeLocation::Boundary);
  }
  SUBCASE("negative entries are outside") {
    Eigen::VectorXd v(4);
    v << 1, -1, 1, 1;
    CHECK(membership(E, v, 1e-10).location == ConeLocation::Outside);
  }
  SUBCASE("non-kernel positive vectors are outside") {
    Eigen::VectorXd v(4);
    v << 5, 1, 2, 1;  // violates r2 = r3
    CHECK(membership(E, v, 1e-10).location == ConeLocation::Outside);
  }
  SUBCASE("sum of all columns is interior") {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    for (const auto& col : E.columns) v += to_double(col);
    CHECK(membership(E, v, 1e-10).location == ConeLocation::Interior);
  }
  SUBCASE("random nonnegative kernel vectors reconstruct to 1e-10") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd j(E.ray_count());
      for (int k = 0; k < j.size(); ++k) j[k] = (rng() % 1000) / 100.0;
      const Eigen::VectorXd v = flux_from_weights(E, j);
      const MembershipResult res = membership(E, v, 1e-10);
      CHECK(res.location != ConeLocation::Outside);
      CHECK(res.residual <= 1e-10 * std::max(1.0, v.norm()));
    }
  }
}
