#include "hopfnet/report.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace hopfnet {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

}  // namespace

json spectral_report_to_json(const SpectralReport& r) {
  json ev = json::array();
  for (const auto& l : r.eigenvalues) ev.push_back({l.real(), l.imag()});
  json j{{"eigenvalues", ev},
         {"n_pos", r.n_pos},
         {"n_neg", r.n_neg},
         {"n_zero", r.n_zero},
         {"tol", r.tol}};
  if (r.dominant)
    j["dominant"] = {{"value", {r.dominant->value.real(), r.dominant->value.imag()}},
                     {"simple", r.dominant->simple},
                     {"strictly_dominant", r.dominant->strictly_dominant}};
  return j;
}

namespace {

SpectralReport spectral_report_from_json(const json& j) {
  SpectralReport r;
  for (const auto& p : j.at("eigenvalues"))
    r.eigenvalues.emplace_back(p[0].get<double>(), p[1].get<double>());
  r.n_pos = j.at("n_pos");
  r.n_neg = j.at("n_neg");
  r.n_zero = j.at("n_zero");
  r.tol = j.at("tol");
  return r;
}

}  // namespace

json outcome_to_json(const CriterionOutcome& o) {
  json j{{"criterion", o.criterion},
         {"verdict", to_string(o.verdict)},
         {"diagnostics", o.diagnostics}};
  if (o.witness1) {
    const auto& w = *o.witness1;
    j["witness"] = {{"xbar", vec_to_json(w.xbar)},
                    {"beta_star", w.beta_star},
                    {"F", vec_to_json(w.F)},
                    {"D", vec_to_json(w.D)},
                    {"rate_constants", vec_to_json(w.a.a)},
                    {"strengthened", w.strengthened},
                    {"report_at_beta_star", spectral_report_to_json(w.report_at_beta_star)}};
  }
  if (o.witness2) {
    const auto& w = *o.witness2;
    j["witness"] = {{"jbar", vec_to_json(w.jbar)},
                    {"rbar", vec_to_json(w.rbar)},
                    {"h_s", vec_to_json(w.h_s)},
                    {"h_u", vec_to_json(w.h_u)},
                    {"crossing_beta", w.crossing_beta},
                    {"h_at_crossing", vec_to_json(w.h_at_crossing)},
                    {"rate_constants", vec_to_json(w.a.a)},
                    {"xbar", vec_to_json(w.xbar)},
                    {"rank_aware", w.rank_aware},
                    {"rank", w.rank},
                    {"report_at_crossing", spectral_report_to_json(w.report_at_crossing)}};
  }
  return j;
}

CriterionOutcome outcome_from_json(const json& j) {
  CriterionOutcome o;
  o.criterion = j.at("criterion");
  const std::string verdict = j.at("verdict");
  o.verdict = verdict == "certified"       ? Verdict::Certified
              : verdict == "inconclusive"  ? Verdict::Inconclusive
                                           : Verdict::HypothesesFailed;
  o.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  if (!j.contains("witness")) return o;
  const json& w = j["witness"];
  if (o.criterion == 1) {
    Criterion1Witness w1;
    w1.xbar = vec_from_json(w.at("xbar"));
    w1.beta_star = w.at("beta_star");
    w1.F = vec_from_json(w.at("F"));
    w1.D = vec_from_json(w.at("D"));
    w1.a.a = vec_from_json(w.at("rate_constants"));
    w1.strengthened = w.at("strengthened");
    w1.report_at_beta_star = spectral_report_from_json(w.at("report_at_beta_star"));
    o.witness1 = std::move(w1);
  } else {
    Criterion2Witness w2;
    w2.jbar = vec_from_json(w.at("jbar"));
    w2.rbar = vec_from_json(w.at("rbar"));
    w2.h_s = vec_from_json(w.at("h_s"));
    w2.h_u = vec_from_json(w.at("h_u"));
    w2.crossing_beta = w.at("crossing_beta");
    w2.h_at_crossing = vec_from_json(w.at("h_at_crossing"));
    w2.a.a = vec_from_json(w.at("rate_constants"));
    w2.xbar = vec_from_json(w.at("xbar"));
    w2.rank_aware = w.at("rank_aware");
    w2.rank = w.at("rank");
    w2.report_at_crossing = spectral_report_from_json(w.at("report_at_crossing"));
    o.witness2 = std::move(w2);
  }
  return o;
}

json metrics_to_json(const OscillationMetrics& m) {
  return json{{"oscillating", m.oscillating},
              {"species_index", m.species_index},
              {"period_estimate", m.period_estimate},
              {"amplitude", m.amplitude},
              {"transient_cut", m.transient_cut},
              {"peak_spread", m.peak_spread},
              {"peak_count", m.peak_count}};
}

namespace {

std::string check(bool ok, const std::string& what) { return ok ? "" : what; }

std::string verify_criterion1(const Network& net, const Criterion1Witness& w,
                              double tol) {
  if (w.xbar.size() != net.species_count()) return "witness dimension mismatch";
  const double resid = residual_norm(net, w.a, w.xbar);
  const double scale =
      std::max(1.0, rate_vector(net, w.a, w.xbar).lpNorm<Eigen::Infinity>());
  if (resid > 1e-9 * scale) return "xbar is not a steady state of the closed system";

  if ((w.D.array() != w.beta_star).any()) return "D is not beta* Id";
  if ((w.F - w.beta_star * w.xbar).lpNorm<Eigen::Infinity>() > tol * scale)
    return "F is not beta* xbar";

  const Eigen::MatrixXd H = open_jacobian(net, w.a, {w.F, w.D}, w.xbar);
  const SpectralReport rep = classify(H, tol);
  if (rep.n_zero != 2) return "shifted Jacobian does not carry exactly one imaginary pair";
  for (const auto& ev : rep.eigenvalues)
    if (std::abs(ev.real()) <= tol && std::abs(ev.imag()) <= tol)
      return "eigenvalue on the axis is not a complex pair";
  return "";
}

std::string verify_criterion2(const Network& net, const Criterion2Witness& w,
                              double tol) {
  const Eigen::MatrixXi N = stoichiometric_matrix(net);
  const Eigen::MatrixXi Y = kinetic_matrix(net);
  const ExtremeRayMatrix E = extreme_rays(N);
  if (E.ray_count() != w.jbar.size()) return "ray count mismatch";

  const Eigen::VectorXd flux = flux_from_weights(E, w.jbar);
  if ((flux - w.rbar).lpNorm<Eigen::Infinity>() >
      tol * std::max(1.0, w.rbar.lpNorm<Eigen::Infinity>()))
    return "rbar does not equal E jbar";
  if (!(flux.minCoeff() > 0)) return "flux is not strictly positive";

  // Stable endpoint.
  const Eigen::MatrixXd B =
      N.cast<double>() * flux.asDiagonal() * Y.cast<double>().transpose();
  const double ctol = default_classify_tol(B);
  if (w.rank_aware) {
    const RankAwareCounts counts = rank_aware_counts(B, w.rank, ctol);
    if (counts.n_neg_of_r != w.rank) return "B(jbar) is not rank-aware stable";
  } else {
    if (!classify(B, ctol).stable()) return "B(jbar) is not stable";
  }

  // Crossing point on the log-linear curve.
  const Eigen::VectorXd h_expected =
      ((1.0 - w.crossing_beta) * w.h_s.array().log() +
       w.crossing_beta * w.h_u.array().log()).exp().matrix();
  if ((h_expected - w.h_at_crossing).lpNorm<Eigen::Infinity>() > 1e-12)
    return "h_at_crossing is off the declared curve";

  const Eigen::MatrixXd G = convex_jacobian(N, Y, E, {w.h_at_crossing, w.jbar});
  const double kernel_band =
      w.rank_aware ? ctol * std::max(1.0, G.lpNorm<Eigen::Infinity>()) : 0.0;
  double min_re = std::numeric_limits<double>::infinity();
  bool has_imag = false;
  for (const auto& ev : spectrum(G)) {
    if (std::abs(ev) <= kernel_band) continue;
    if (std::abs(ev.real()) < min_re) {
      min_re = std::abs(ev.real());
      has_imag = std::abs(ev.imag()) > tol;
    }
  }
  if (min_re > tol) return "no eigenvalue pair on the imaginary axis at the crossing";
  if (!has_imag) return "axis eigenvalue at the crossing is real, not a Hopf pair";

  // Realized system consistency.
  if ((w.xbar - w.h_at_crossing.cwiseInverse()).lpNorm<Eigen::Infinity>() > 1e-12)
    return "xbar is not 1/h";
  const Eigen::VectorXd r_realized = rate_vector(net, w.a, w.xbar);
  if ((r_realized - w.rbar).lpNorm<Eigen::Infinity>() >
      1e-10 * std::max(1.0, w.rbar.lpNorm<Eigen::Infinity>()))
    return "rate constants do not realize the declared flux";
  return "";
}

}  // namespace

std::string verify_outcome(const Network& net, const CriterionOutcome& outcome,
                           double tol) {
  if (outcome.verdict != Verdict::Certified)
    return "outcome is not certified; nothing to verify";
  if (outcome.criterion == 1) {
    if (!outcome.witness1) return check(false, "missing criterion-1 witness");
    return verify_criterion1(net, *outcome.witness1, tol);
  }
  if (outcome.criterion == 2) {
    if (!outcome.witness2) return check(false, "missing criterion-2 witness");
    return verify_criterion2(net, *outcome.witness2, tol);
  }
  return "unknown criterion";
}

std::string trajectory_to_csv(const Network& net, const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  out << "t";
  for (const auto& sp : net.species()) out << "," << sp.name;
  out << "\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    out << traj.times[i];
    for (int n = 0; n < traj.states[i].size(); ++n) out << "," << traj.states[i][n];
    out << "\n";
  }
  return out.str();
}

}  // namespace hopfnet
