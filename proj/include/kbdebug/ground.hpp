#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbdebug/dpi.hpp"

namespace kbdebug {

struct GroundTheory {
  std::map<std::string, int> variables;  // ground atom -> SAT variable (1-based)
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> provenance;  // per clause: "ax3", "P0", "N1", "goal", ...
  std::vector<std::string> domain;

  int num_vars() const { return next_var - 1; }
  int next_var = 1;
};

class GroundingError : public std::runtime_error {
 public:
  GroundingError(const std::string& source, const std::string& msg)
      : std::runtime_error(source + ": " + msg), source_(source) {}
  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

struct SourcedFormula {
  const Formula* formula;
  std::string source;
};

struct GroundRequest {
  std::vector<SourcedFormula> theory;
  // Encoded as the negation of their conjunction (entailment goal).
  std::vector<const Formula*> negated_goal;
  std::vector<std::string> extra_constants;
  int witness_budget = 1;
};

GroundTheory ground(const GroundRequest& req);

// O ∪ B ∪ ⋃P of the instance.
GroundTheory ground(const Dpi& dpi, int witness_budget = 1);

std::string atom_name(const std::string& pred, const std::vector<std::string>& args);

}  // namespace kbdebug
