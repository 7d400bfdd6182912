#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopfnet/rational_linalg.hpp"

namespace hopfnet {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

struct Species {
  std::string name;
  int index = 0;
};

enum class ReactionKind { Inflow, Outflow, Internal };

struct Reaction {
  std::string label;
  std::map<int, int> reactants;  // species index -> coefficient >= 1
  std::map<int, int> products;

  ReactionKind kind() const {
    if (reactants.empty()) return ReactionKind::Inflow;
    if (products.empty()) return ReactionKind::Outflow;
    return ReactionKind::Internal;
  }
};

class Network {
 public:
  Network(std::vector<Species> species, std::vector<Reaction> reactions);

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  int species_count() const { return static_cast<int>(species_.size()); }
  int reaction_count() const { return static_cast<int>(reactions_.size()); }

  /// -1 if absent.
  int species_index(const std::string& name) const;
  int reaction_index(const std::string& label) const;

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
};

/// Parses the line-oriented reaction grammar. Throws ParseError.
Network parse_network(const std::string& text);

/// Canonical text form; parse_network(render(net)) == net.
std::string render(const Network& net);

Eigen::MatrixXi stoichiometric_matrix(const Network& net);
Eigen::MatrixXi kinetic_matrix(const Network& net);

/// Adds the missing per-species inflow ("in_<name>") and outflow
/// ("out_<name>") reactions. Idempotent.
Network fully_open_extension(const Network& net);

/// Exact basis of the left kernel of N; empty iff N has full row rank.
std::vector<RationalVector> conservation_basis(const Eigen::MatrixXi& N);

}  // namespace hopfnet
