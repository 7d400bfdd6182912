#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hopfnet/criteria.hpp"
#include "hopfnet/report.hpp"
#include "hopfnet/simulate.hpp"

using nlohmann::json;
using namespace hopfnet;

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitError = 1;
constexpr int kExitHypothesesFailed = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Network load_network(const std::string& path) {
  return parse_network(read_file(path));
}

RateConstants load_rates(const Network& net, const std::string& path) {
  const json cfg = json::parse(read_file(path));
  if (!cfg.is_object()) throw std::runtime_error("rate config must be a JSON object");
  RateConstants a;
  a.a.resize(net.reaction_count());
  for (const auto& r : net.reactions()) {
    if (!cfg.contains(r.label))
      throw std::runtime_error("rate config is missing reaction '" + r.label + "'");
    const double v = cfg[r.label].get<double>();
    if (!(v > 0)) throw std::runtime_error("rate for '" + r.label + "' must be positive");
    a.a[net.reaction_index(r.label)] = v;
  }
  for (const auto& [key, _] : cfg.items())
    if (net.reaction_index(key) < 0)
      throw std::runtime_error("rate config has unknown reaction '" + key + "'");
  return a;
}

Eigen::VectorXd parse_vector(const std::string& csv, int expected) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (static_cast<int>(vals.size()) != expected)
    throw std::runtime_error("expected " + std::to_string(expected) +
                             " comma-separated values, got " + std::to_string(vals.size()));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

// Damped Newton on the closed-system RHS.
SteadyState newton_steady_state(const Network& net, const RateConstants& a,
                                Eigen::VectorXd x, double tol) {
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd f = rhs(net, a, x);
    const double res = f.lpNorm<Eigen::Infinity>();
    if (res <= tol) return {x, res};
    const Eigen::VectorXd step = jacobian(net, a, x).fullPivLu().solve(-f);
    double damp = 1.0;
    while (damp > 1e-6) {
      Eigen::VectorXd trial = x + damp * step;
      if (trial.minCoeff() > 0 &&
          residual_norm(net, a, trial) < res)
        break;
      damp *= 0.5;
    }
    if (damp <= 1e-6)
      throw std::runtime_error("Newton stalled, residual " + std::to_string(res));
    x += damp * step;
  }
  throw std::runtime_error("Newton did not converge, residual " +
                           std::to_string(residual_norm(net, a, x)));
}

void emit(const std::string& output_dir, const std::string& name,
          const std::string& content) {
  if (output_dir.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::create_directories(output_dir);
  std::ofstream out(std::filesystem::path(output_dir) / name, std::ios::binary);
  out << content;
}

std::string matrix_csv(const Eigen::MatrixXi& m, const Network& net,
                       const char* corner) {
  std::ostringstream out;
  out << corner;
  for (const auto& r : net.reactions()) out << "," << r.label;
  out << "\n";
  for (int n = 0; n < m.rows(); ++n) {
    out << net.species()[n].name;
    for (int i = 0; i < m.cols(); ++i) out << "," << m(n, i);
    out << "\n";
  }
  return out.str();
}

json base_report(const std::string& file, const std::string& command,
                 std::uint64_t seed, double tol) {
  return json{{"schema", kReportSchemaVersion},
              {"tool_version", kToolVersion},
              {"command", command},
              {"network_file", file},
              {"network_sha256", sha256_file(file)},
              {"seed", seed},
              {"tol", tol}};
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Certified: return kExitCertified;
    case Verdict::HypothesesFailed: return kExitHypothesesFailed;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopfnet: Hopf-bifurcation criteria for mass action networks"};
  app.require_subcommand(1);

  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::string format = "json";
  app.add_option("--tol", tol, "certification tolerance on |Re(mu)|");
  app.add_option("--seed", seed, "search seed");
  app.add_option("--output", output_dir, "write outputs to this directory");
  app.add_option("--format", format, "json|csv for matrix output")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string file, rates_path, steady_csv, guess_csv, x0_csv, report_path;
  int samples = 50, budget = 2000, grid = 64;
  bool demo = false;
  double delta = 0.0, t_end = 400.0, rtol = 1e-8, atol = 1e-10;
  std::string rank_aware_mode = "auto";

  auto* cmd_matrices = app.add_subcommand("matrices", "print N, Y and the conservation basis");
  cmd_matrices->add_option("file", file)->required();

  auto* cmd_rays = app.add_subcommand("rays", "extreme rays of the flux cone as CSV");
  cmd_rays->add_option("file", file)->required();

  auto* cmd_c1 = app.add_subcommand("criterion1", "fully-open spectrum-shift criterion");
  cmd_c1->add_option("file", file)->required();
  cmd_c1->add_option("--rates", rates_path, "JSON rate-constant config")->required();
  cmd_c1->add_option("--steady-state", steady_csv, "comma-separated steady state");
  cmd_c1->add_option("--guess", guess_csv, "Newton initial guess");
  cmd_c1->add_flag("--demo", demo, "simulate past the bifurcation");
  cmd_c1->add_option("--delta", delta, "demo offset below beta* (default 0.05 beta*)");
  cmd_c1->add_option("--t-end", t_end, "demo integration horizon");

  auto* cmd_c2 = app.add_subcommand("criterion2", "convex-coordinate stability-change criterion");
  cmd_c2->add_option("file", file)->required();
  cmd_c2->add_option("--samples", samples, "ray-weight samples");
  cmd_c2->add_option("--budget", budget, "D-instability evaluation budget per sample");
  cmd_c2->add_option("--grid", grid, "curve scan resolution");
  cmd_c2->add_option("--rank-aware", rank_aware_mode, "auto|on|off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  cmd_c2->add_flag("--demo", demo, "simulate past the crossing");
  cmd_c2->add_option("--delta", delta, "demo offset past the crossing (default 0.05)");
  cmd_c2->add_option("--t-end", t_end, "demo integration horizon");

  auto* cmd_sim = app.add_subcommand("simulate", "integrate the closed system");
  cmd_sim->add_option("file", file)->required();
  cmd_sim->add_option("--rates", rates_path)->required();
  cmd_sim->add_option("--x0", x0_csv, "comma-separated initial condition")->required();
  cmd_sim->add_option("--t-end", t_end);
  cmd_sim->add_option("--rtol", rtol);
  cmd_sim->add_option("--atol", atol);

  auto* cmd_verify = app.add_subcommand("verify", "re-verify a certified report");
  cmd_verify->add_option("report", report_path)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_matrices) {
      const Network net = load_network(file);
      const Eigen::MatrixXi N = stoichiometric_matrix(net);
      std::ostringstream out;
      out << "# stoichiometric matrix N\n" << matrix_csv(N, net, "species\\reaction");
      out << "# kinetic matrix Y\n" << matrix_csv(kinetic_matrix(net), net, "species\\reaction");
      out << "# conservation basis (left kernel of N)\n";
      const auto basis = conservation_basis(N);
      if (basis.empty()) out << "none\n";
      for (const auto& v : basis) {
        for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
        out << "\n";
      }
      emit(output_dir, "matrices.csv", out.str());
      return 0;
    }

    if (*cmd_rays) {
      const Network net = load_network(file);
      const ExtremeRayMatrix E = extreme_rays(stoichiometric_matrix(net));
      std::ostringstream out;
      out << "reaction";
      for (int k = 0; k < E.ray_count(); ++k) out << ",E" << k;
      out << "\n";
      for (int i = 0; i < net.reaction_count(); ++i) {
        out << net.reactions()[i].label;
        for (int k = 0; k < E.ray_count(); ++k) out << "," << E.columns[k][i];
        out << "\n";
      }
      emit(output_dir, "rays.csv", out.str());
      return 0;
    }

    if (*cmd_c1) {
      const Network net = load_network(file);
      const RateConstants a = load_rates(net, rates_path);
      SteadyState ss;
      if (!steady_csv.empty()) {
        ss.x = parse_vector(steady_csv, net.species_count());
        ss.residual = residual_norm(net, a, ss.x);
      } else if (!guess_csv.empty()) {
        ss = newton_steady_state(net, a, parse_vector(guess_csv, net.species_count()),
                                 1e-12);
      } else {
        std::cerr << "criterion1 needs --steady-state or --guess\n";
        return kExitUsage;
      }

      const CriterionOutcome outcome = criterion1(net, a, ss.x, tol);
      json report = base_report(file, "criterion1", seed, tol);
      report["steady_state"] = {{"x", json::array()}, {"residual", ss.residual}};
      for (int n = 0; n < ss.x.size(); ++n) report["steady_state"]["x"].push_back(ss.x[n]);
      report["outcome"] = outcome_to_json(outcome);

      if (demo && outcome.verdict == Verdict::Certified) {
        const double d = delta > 0 ? delta : 0.05 * outcome.witness1->beta_star;
        auto [traj, metrics] = hopf_demo(net, a, outcome, d, t_end);
        report["demo"] = metrics_to_json(metrics);
        report["demo"]["delta"] = d;
        emit(output_dir, "trajectory.csv", trajectory_to_csv(net, traj));
      }
      emit(output_dir, "report.json", report.dump(2) + "\n");
      return verdict_exit(outcome.verdict);
    }

    if (*cmd_c2) {
      const Network net = load_network(file);
      if (samples < 1) {
        std::cerr << "--samples must be >= 1\n";
        return kExitUsage;
      }
      Criterion2Options opts;
      opts.samples = samples;
      opts.budget = budget;
      opts.seed = seed;
      opts.tol = tol;
      opts.grid = grid;

      const int rank = rational_rank(to_rational(stoichiometric_matrix(net)));
      bool rank_aware = rank < net.species_count();
      if (rank_aware_mode == "on") rank_aware = true;
      if (rank_aware_mode == "off") rank_aware = false;

      CriterionOutcome outcome;
      try {
        outcome = rank_aware ? criterion2_rank_aware(net, opts)
                             : criterion2_search(net, opts);
      } catch (const std::runtime_error& e) {
        // Trivial cone and kin carry no witness by construction.
        std::cerr << e.what() << "\n";
        return kExitHypothesesFailed;
      }

      json report = base_report(file, "criterion2", seed, tol);
      report["samples"] = samples;
      report["budget"] = budget;
      report["mode"] = rank_aware
                           ? "rank-aware mode, r = " + std::to_string(rank)
                           : "full-rank mode";
      report["outcome"] = outcome_to_json(outcome);

      if (demo && outcome.verdict == Verdict::Certified) {
        const double d = delta > 0 ? delta : 0.05;
        auto [traj, metrics] =
            hopf_demo(net, outcome.witness2->a, outcome, d, t_end);
        report["demo"] = metrics_to_json(metrics);
        report["demo"]["delta"] = d;
        emit(output_dir, "trajectory.csv", trajectory_to_csv(net, traj));
      }
      emit(output_dir, "report.json", report.dump(2) + "\n");
      return verdict_exit(outcome.verdict);
    }

    if (*cmd_sim) {
      const Network net = load_network(file);
      const RateConstants a = load_rates(net, rates_path);
      const Eigen::VectorXd x0 = parse_vector(x0_csv, net.species_count());
      IntegrateOptions iopts;
      iopts.rtol = rtol;
      iopts.atol = atol;
      const Trajectory traj = integrate(net, a, nullptr, x0, t_end, iopts);
      emit(output_dir, "trajectory.csv", trajectory_to_csv(net, traj));
      const OscillationMetrics metrics = detect_oscillation(traj);
      emit(output_dir, "metrics.json", metrics_to_json(metrics).dump(2) + "\n");
      return 0;
    }

    if (*cmd_verify) {
      const json report = json::parse(read_file(report_path));
      const std::string net_file = report.at("network_file");
      const std::string digest = sha256_file(net_file);
      if (digest != report.at("network_sha256").get<std::string>()) {
        std::cerr << "digest mismatch: report was produced from a different network file\n";
        return kExitError;
      }
      const Network net = load_network(net_file);
      const CriterionOutcome outcome = outcome_from_json(report.at("outcome"));
      const double vtol = report.value("tol", 1e-8);
      const std::string failure = verify_outcome(net, outcome, vtol);
      if (!failure.empty()) {
        std::cerr << "verification failed: " << failure << "\n";
        return kExitError;
      }
      std::cout << "verified: " << to_string(outcome.verdict) << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
