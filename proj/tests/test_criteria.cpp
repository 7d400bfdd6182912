#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "hopfnet/criteria.hpp"
#include "hopfnet/report.hpp"
#include "oracles.hpp"

using namespace hopfnet;

namespace {

struct Sna {
  Network net;
  Eigen::MatrixXi N, Y;
  ExtremeRayMatrix E;
};

Sna sna_of(const char* text) {
  Network net = parse_network(text);
  Eigen::MatrixXi N = stoichiometric_matrix(net);
  Eigen::MatrixXi Y = kinetic_matrix(net);
  ExtremeRayMatrix E = extreme_rays(N);
  return {std::move(net), std::move(N), std::move(Y), std::move(E)};
}

}  // namespace

TEST_CASE("convex Jacobian") {
  const Sna s = sna_of(corpus::kBrusselator);
  std::mt19937_64 rng(51);

  SUBCASE("h = 1 gives B(j)") {
    const Eigen::VectorXd j = Eigen::Vector2d(1.0, 2.0);
    const Eigen::MatrixXd G =
        convex_jacobian(s.N, s.Y, s.E, {Eigen::VectorXd::Ones(2), j});
    const Eigen::VectorXd flux = flux_from_weights(s.E, j);
    const Eigen::MatrixXd B =
        s.N.cast<double>() * flux.asDiagonal() * s.Y.cast<double>().transpose();
    CHECK((G - B).norm() == 0.0);
  }

  SUBCASE("sign det G(h, j) = sign det B(j) for random h") {
    const Eigen::VectorXd j = Eigen::Vector2d(1.0, 2.0);
    const double det_b =
        convex_jacobian(s.N, s.Y, s.E, {Eigen::VectorXd::Ones(2), j})
            .determinant();
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd h = oracles::random_positive(rng, 2, 0.01, 100.0);
      const double det_g = convex_jacobian(s.N, s.Y, s.E, {h, j}).determinant();
      CHECK(det_g * det_b > 0.0);
    }
  }
}

TEST_CASE("realize_system is consistent with the SNA formalism") {
  std::mt19937_64 rng(52);
  int done = 0;
  while (done < 20) {
    const Network closed = oracles::random_network(rng, 5, 4);
    const Sna s = sna_of(render(fully_open_extension(closed)).c_str());
    if (s.E.trivial()) continue;

    const Eigen::VectorXd h =
        oracles::random_positive(rng, s.net.species_count(), 0.2, 5.0);
    const Eigen::VectorXd j =
        oracles::random_positive(rng, s.E.ray_count(), 0.1, 10.0);
    if (!(flux_from_weights(s.E, j).minCoeff() > 0)) continue;

    const auto [a, ss] = realize_system(s.net, s.E, {h, j});
    CHECK((ss.x - h.cwiseInverse()).norm() == 0.0);
    const Eigen::VectorXd rbar = flux_from_weights(s.E, j);
    CHECK(ss.residual <= 1e-10 * std::max(1.0, rbar.norm()));

    // The central cross-check: analytic Jacobian of the realized system
    // equals the convex-coordinate Jacobian.
    const Eigen::MatrixXd G_dyn = jacobian(s.net, a, ss.x);
    const Eigen::MatrixXd G_sna = convex_jacobian(s.N, s.Y, s.E, {h, j});
    const double scale = std::max(1.0, G_sna.lpNorm<Eigen::Infinity>());
    CHECK((G_dyn - G_sna).lpNorm<Eigen::Infinity>() / scale <= 1e-10);
    ++done;
  }

  SUBCASE("h = 1 realizes the unit steady state with a = rbar") {
    const Sna s = sna_of(corpus::kBrusselator);
    const Eigen::VectorXd j = Eigen::Vector2d(3.0, 4.0);
    const auto [a, ss] = realize_system(s.net, s.E, {Eigen::VectorXd::Ones(2), j});
    CHECK((ss.x - Eigen::VectorXd::Ones(2)).norm() == 0.0);
    CHECK((a.a - flux_from_weights(s.E, j)).norm() == 0.0);
  }

  SUBCASE("doubling j doubles a and keeps the steady state") {
    const Sna s = sna_of(corpus::kBrusselator);
    const Eigen::VectorXd h = Eigen::Vector2d(0.5, 2.0);
    const Eigen::VectorXd j = Eigen::Vector2d(1.0, 2.0);
    const auto [a1, ss1] = realize_system(s.net, s.E, {h, j});
    const auto [a2, ss2] = realize_system(s.net, s.E, {h, 2 * j});
    CHECK((ss1.x - ss2.x).norm() == 0.0);
    CHECK((2 * a1.a - a2.a).lpNorm<Eigen::Infinity>() <= 1e-14 * a2.a.maxCoeff());
  }
}

TEST_CASE("criterion 1 on the Brusselator") {
  const Network net = parse_network(corpus::kBrusselator);
  const Eigen::VectorXd xbar = Eigen::Vector2d(1.0, 3.0);

  SUBCASE("b = 3: certified with beta* = 1/2") {
    RateConstants a{(Eigen::VectorXd(4) << 1, 3, 1, 1).finished()};
    const CriterionOutcome out = criterion1(net, a, xbar, 1e-8);
    CHECK(out.verdict == Verdict::Certified);
    REQUIRE(out.witness1.has_value());
    CHECK(out.witness1->beta_star == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.witness1->strengthened);
    CHECK(out.witness1->report_at_beta_star.n_zero == 2);
    for (const auto& ev : out.witness1->report_at_beta_star.eigenvalues)
      if (std::abs(ev.real()) <= 1e-8)
        CHECK(std::abs(ev.imag()) == doctest::Approx(std::sqrt(3.0) / 2));
  }

  SUBCASE("b = 1.5: stable Jacobian fails the hypotheses") {
    RateConstants a{(Eigen::VectorXd(4) << 1, 1.5, 1, 1).finished()};
    const Eigen::VectorXd ss = Eigen::Vector2d(1.0, 1.5);
    const CriterionOutcome out = criterion1(net, a, ss, 1e-8);
    CHECK(out.verdict == Verdict::HypothesesFailed);
  }

  SUBCASE("non-steady state rejected") {
    RateConstants a{(Eigen::VectorXd(4) << 1, 3, 1, 1).finished()};
    CHECK_THROWS_AS(criterion1(net, a, Eigen::Vector2d(2.0, 2.0), 1e-8),
                    std::runtime_error);
  }
}

TEST_CASE("hopf_scan") {
  const Sna s = sna_of(corpus::kBrusselator);
  const Eigen::VectorXd j = Eigen::Vector2d(1.0, 2.0);  // B = [[1,2],[-2,-2]]
  const Eigen::VectorXd h_s = Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd h_u = Eigen::Vector2d(10.0, 1.0);  // trace 10-4 > 0

  SUBCASE("brackets and refines the crossing") {
    const HopfCurve curve = hopf_scan(s.N, s.Y, s.E, j, h_s, h_u, 64, 1e-8, 2);
    CHECK(curve.crossing_beta > 0.0);
    CHECK(curve.crossing_beta < 1.0);
    double min_re = 1e300;
    for (const auto& ev : curve.report_at_crossing.eigenvalues)
      min_re = std::min(min_re, std::abs(ev.real()));
    CHECK(min_re <= 1e-8);
    // Trace crossing of B diag(h) happens at h1 = 2 h2 on this curve.
    const Eigen::VectorXd h_c =
        ((1 - curve.crossing_beta) * h_s.array().log() +
         curve.crossing_beta * h_u.array().log()).exp();
    CHECK(h_c[0] == doctest::Approx(2.0 * h_c[1]).epsilon(1e-6));
  }

  SUBCASE("equal endpoints give no net change") {
    CHECK_THROWS_WITH_AS(hopf_scan(s.N, s.Y, s.E, j, h_s, h_s, 16, 1e-8, 2),
                         doctest::Contains("no net stability change"),
                         std::runtime_error);
  }

  SUBCASE("sign det is constant across all grid samples") {
    const int grid = 64;
    double sign = 0;
    for (int g = 0; g <= grid; ++g) {
      const double beta = static_cast<double>(g) / grid;
      const Eigen::VectorXd h =
          ((1 - beta) * h_s.array().log() + beta * h_u.array().log()).exp();
      const double det = convex_jacobian(s.N, s.Y, s.E, {h, j}).determinant();
      REQUIRE(det != 0.0);
      if (g == 0) sign = det > 0 ? 1 : -1;
      CHECK(det * sign > 0.0);
    }
  }
}

TEST_CASE("criterion 2 search on the Brusselator") {
  const Network net = parse_network(corpus::kBrusselator);
  Criterion2Options opts;
  opts.samples = 20;
  opts.budget = 2000;
  opts.seed = 7;

  const CriterionOutcome out = criterion2_search(net, opts);
  REQUIRE(out.verdict == Verdict::Certified);
  REQUIRE(out.witness2.has_value());
  const auto& w = *out.witness2;
  CHECK(w.crossing_beta > 0.0);
  CHECK(w.crossing_beta < 1.0);

  SUBCASE("the crossing pair is on the axis") {
    double min_re = 1e300;
    for (const auto& ev : w.report_at_crossing.eigenvalues)
      min_re = std::min(min_re, std::abs(ev.real()));
    CHECK(min_re <= 1e-8);
  }

  SUBCASE("the stable endpoint has a stable steady state") {
    const Sna s = sna_of(corpus::kBrusselator);
    const Eigen::MatrixXd B = convex_jacobian(s.N, s.Y, s.E, {w.h_s, w.jbar});
    CHECK(classify(B, default_classify_tol(B)).stable());
  }

  SUBCASE("certified witness survives independent re-verification") {
    CHECK(verify_outcome(net, out, 1e-8).empty());

    // Tampering with the crossing must be detected.
    CriterionOutcome tampered = out;
    tampered.witness2->crossing_beta += 1e-3;
    tampered.witness2->h_at_crossing =
        ((1 - tampered.witness2->crossing_beta) * w.h_s.array().log() +
         tampered.witness2->crossing_beta * w.h_u.array().log()).exp();
    tampered.witness2->xbar = tampered.witness2->h_at_crossing.cwiseInverse();
    tampered.witness2->a =
        fit_rate_constants(net, tampered.witness2->xbar, w.rbar);
    CHECK_FALSE(verify_outcome(net, tampered, 1e-8).empty());
  }

  SUBCASE("JSON round trip preserves the witness") {
    const auto json_out = outcome_to_json(out);
    const CriterionOutcome back = outcome_from_json(json_out);
    REQUIRE(back.witness2.has_value());
    CHECK((back.witness2->jbar - w.jbar).norm() == 0.0);
    CHECK(back.witness2->crossing_beta == w.crossing_beta);
    CHECK(verify_outcome(net, back, 1e-8).empty());
  }

  SUBCASE("determinism: same seed, same outcome") {
    const CriterionOutcome again = criterion2_search(net, opts);
    CHECK(outcome_to_json(again) == outcome_to_json(out));
  }
}

TEST_CASE("criterion 2 rank-aware variant") {
  const Network net = parse_network(corpus::kConservedAssoc);
  Criterion2Options opts;
  opts.samples = 10;
  opts.budget = 500;
  opts.seed = 3;

  // B(j) is rank one with negative trace for every j: the pipeline runs in
  // rank-aware mode but can never find a D-instability witness.
  const CriterionOutcome out = criterion2_rank_aware(net, opts);
  CHECK(out.verdict == Verdict::Inconclusive);
  CHECK_FALSE(out.diagnostics.empty());

  SUBCASE("full-rank entry point rejects rank-deficient networks") {
    CHECK_THROWS_AS(criterion2_search(net, opts), std::invalid_argument);
  }
  SUBCASE("rank-aware entry point rejects full-rank networks") {
    CHECK_THROWS_AS(
        criterion2_rank_aware(parse_network(corpus::kBrusselator), opts),
        std::invalid_argument);
  }
}

TEST_CASE("trivial cone is a distinguished error") {
  Criterion2Options opts;
  opts.samples = 2;
  CHECK_THROWS_WITH_AS(criterion2_search(parse_network("r1: -> A\n"), opts),
                       doctest::Contains("trivial"), std::runtime_error);
}
