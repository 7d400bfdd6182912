#include "hopfnet/network.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace hopfnet {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool has_reserved_prefix(const std::string& label) {
  return label.rfind("in_", 0) == 0 || label.rfind("out_", 0) == 0;
}

struct LineScanner {
  const std::string& s;
  size_t pos = 0;
  int line;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  bool accept(const std::string& tok) {
    skip_ws();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  std::string identifier() {
    skip_ws();
    if (pos >= s.size() || !is_ident_start(s[pos]))
      throw ParseError(line, "expected identifier near '" + s.substr(pos) + "'");
    size_t start = pos;
    while (pos < s.size() && is_ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }
  long integer() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw ParseError(line, "expected integer");
    return std::stol(s.substr(start, pos - start));
  }
  bool peek_digit() {
    skip_ws();
    return pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]));
  }
};

}  // namespace

Network::Network(std::vector<Species> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty() || reactions_.empty())
    throw std::invalid_argument("network needs at least one species and one reaction");
  std::set<std::string> names, labels;
  for (size_t n = 0; n < species_.size(); ++n) {
    if (!names.insert(species_[n].name).second)
      throw std::invalid_argument("duplicate species name " + species_[n].name);
    if (species_[n].index != static_cast<int>(n))
      throw std::invalid_argument("species index out of order");
  }
  for (const auto& r : reactions_) {
    if (!labels.insert(r.label).second)
      throw std::invalid_argument("duplicate reaction label " + r.label);
    if (r.reactants.empty() && r.products.empty())
      throw std::invalid_argument("reaction " + r.label + " has both sides empty");
    for (const auto& side : {r.reactants, r.products})
      for (const auto& [idx, coeff] : side) {
        if (idx < 0 || idx >= static_cast<int>(species_.size()))
          throw std::invalid_argument("reaction " + r.label + " references bad species index");
        if (coeff < 1)
          throw std::invalid_argument("reaction " + r.label + " has a zero coefficient");
      }
  }
}

int Network::species_index(const std::string& name) const {
  for (const auto& sp : species_)
    if (sp.name == name) return sp.index;
  return -1;
}

int Network::reaction_index(const std::string& label) const {
  for (size_t i = 0; i < reactions_.size(); ++i)
    if (reactions_[i].label == label) return static_cast<int>(i);
  return -1;
}

Network parse_network(const std::string& text) {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  std::set<std::string> labels;

  auto species_id = [&](const std::string& name) {
    for (const auto& sp : species)
      if (sp.name == name) return sp.index;
    species.push_back({name, static_cast<int>(species.size())});
    return species.back().index;
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    LineScanner sc{raw, 0, line_no};
    if (sc.done()) continue;

    // Optional "label :" prefix; lookahead over the first identifier.
    std::string label;
    {
      size_t save = sc.pos;
      if (!sc.peek_digit() && !sc.peek_is('-')) {
        std::string id = sc.identifier();
        if (sc.peek_is(':')) {
          sc.accept(":");
          label = id;
        } else {
          sc.pos = save;
        }
      }
    }
    if (label.empty()) label = "r" + std::to_string(line_no);
    if (!labels.insert(label).second)
      throw ParseError(line_no, "duplicate reaction label '" + label + "'");

    auto parse_side = [&](std::map<int, int>& side, bool stop_at_arrow) {
      if (stop_at_arrow && sc.peek_is('-')) return;  // empty side
      if (!stop_at_arrow && sc.done()) return;
      while (true) {
        long coeff = 1;
        if (sc.peek_digit()) coeff = sc.integer();
        if (coeff == 0) throw ParseError(line_no, "zero stoichiometric coefficient");
        std::string name = sc.identifier();
        side[species_id(name)] += static_cast<int>(coeff);
        if (!sc.accept("+")) break;
      }
    };

    Reaction r;
    r.label = label;
    parse_side(r.reactants, true);
    if (!sc.accept("->")) throw ParseError(line_no, "expected '->'");
    if (!sc.done()) parse_side(r.products, false);
    if (!sc.done()) throw ParseError(line_no, "trailing input '" + raw.substr(sc.pos) + "'");
    if (r.reactants.empty() && r.products.empty())
      throw ParseError(line_no, "reaction with both sides empty");
    // in_/out_ labels are reserved for the canonical single-species flows,
    // so fully_open_extension stays unambiguous.
    if (has_reserved_prefix(label)) {
      auto canonical_flow = [&](const std::map<int, int>& full,
                                const std::map<int, int>& empty,
                                const std::string& prefix) {
        return empty.empty() && full.size() == 1 && full.begin()->second == 1 &&
               label == prefix + species[full.begin()->first].name;
      };
      if (!canonical_flow(r.products, r.reactants, "in_") &&
          !canonical_flow(r.reactants, r.products, "out_"))
        throw ParseError(line_no, "label '" + label +
                                      "' uses the reserved in_/out_ prefix");
    }
    reactions.push_back(std::move(r));
  }
  if (species.empty() || reactions.empty())
    throw ParseError(line_no, "no reactions found");
  return Network(std::move(species), std::move(reactions));
}

std::string render(const Network& net) {
  std::ostringstream out;
  auto write_side = [&](const std::map<int, int>& side) {
    bool first = true;
    for (const auto& [idx, coeff] : side) {
      if (!first) out << " + ";
      first = false;
      if (coeff != 1) out << coeff << " ";
      out << net.species()[idx].name;
    }
  };
  for (const auto& r : net.reactions()) {
    out << r.label << ": ";
    write_side(r.reactants);
    out << (r.reactants.empty() ? "->" : " ->");
    if (!r.products.empty()) {
      out << " ";
      write_side(r.products);
    }
    out << "\n";
  }
  return out.str();
}

Eigen::MatrixXi stoichiometric_matrix(const Network& net) {
  Eigen::MatrixXi N = Eigen::MatrixXi::Zero(net.species_count(), net.reaction_count());
  for (int i = 0; i < net.reaction_count(); ++i) {
    const auto& r = net.reactions()[i];
    for (const auto& [n, s] : r.reactants) N(n, i) -= s;
    for (const auto& [n, s] : r.products) N(n, i) += s;
  }
  return N;
}

Eigen::MatrixXi kinetic_matrix(const Network& net) {
  Eigen::MatrixXi Y = Eigen::MatrixXi::Zero(net.species_count(), net.reaction_count());
  for (int i = 0; i < net.reaction_count(); ++i)
    for (const auto& [n, s] : net.reactions()[i].reactants) Y(n, i) = s;
  return Y;
}

Network fully_open_extension(const Network& net) {
  std::vector<bool> has_in(net.species_count(), false), has_out(net.species_count(), false);
  for (const auto& r : net.reactions()) {
    if (r.kind() == ReactionKind::Inflow && r.products.size() == 1 &&
        r.products.begin()->second == 1)
      has_in[r.products.begin()->first] = true;
    if (r.kind() == ReactionKind::Outflow && r.reactants.size() == 1 &&
        r.reactants.begin()->second == 1)
      has_out[r.reactants.begin()->first] = true;
  }
  std::vector<Reaction> reactions = net.reactions();
  for (int n = 0; n < net.species_count(); ++n) {
    const std::string& name = net.species()[n].name;
    if (!has_in[n]) {
      Reaction r;
      r.label = "in_" + name;
      r.products[n] = 1;
      reactions.push_back(std::move(r));
    }
    if (!has_out[n]) {
      Reaction r;
      r.label = "out_" + name;
      r.reactants[n] = 1;
      reactions.push_back(std::move(r));
    }
  }
  return Network(net.species(), std::move(reactions));
}

std::vector<RationalVector> conservation_basis(const Eigen::MatrixXi& N) {
  return left_nullspace(to_rational(N));
}

}  // namespace hopfnet
