#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hopfnet/criteria.hpp"
#include "hopfnet/simulate.hpp"

namespace hopfnet {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

nlohmann::json spectral_report_to_json(const SpectralReport& r);
nlohmann::json outcome_to_json(const CriterionOutcome& o);
nlohmann::json metrics_to_json(const OscillationMetrics& m);

CriterionOutcome outcome_from_json(const nlohmann::json& j);

/// Re-derives every matrix and spectrum of a certified witness from the
/// network file alone and re-applies the certification tolerances.
/// Returns an empty string on success, else the first failure.
std::string verify_outcome(const Network& net, const CriterionOutcome& outcome,
                           double tol);

std::string trajectory_to_csv(const Network& net, const Trajectory& traj);

}  // namespace hopfnet
