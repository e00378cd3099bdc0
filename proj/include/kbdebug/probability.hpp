#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kbdebug/diagnosis.hpp"

namespace kbdebug {

struct FaultModel {
  std::map<std::string, double> element_probs;  // F_se per syntax element
  double default_axiom_prob = 0.001;
  // Per-axiom values that bypass the syntax formula (user-supplied beliefs).
  std::map<int, double> axiom_overrides;
};

FaultModel fault_model_from_json(const nlohmann::json& j);
nlohmann::json fault_model_to_json(const FaultModel& m);

double axiom_fault_prob(const Axiom& ax, const FaultModel& m);
AxiomProbs axiom_fault_probs(const Dpi& dpi, const FaultModel& m);

double diagnosis_prior(const IdSet& diag, const std::vector<Axiom>& kb, const AxiomProbs& probs);

// Indices into the leading-diagnosis list.
struct QPartition {
  std::vector<int> d_plus;
  std::vector<int> d_minus;
  std::vector<int> d_zero;
  bool operator==(const QPartition&) const = default;
  auto operator<=>(const QPartition&) const = default;
};

enum class Answer { Yes, No, Skip };

class ContradictionError : public std::runtime_error {
 public:
  ContradictionError() : std::runtime_error("answer contradicts every leading diagnosis") {}
};

using Belief = std::vector<double>;

Belief normalize(Belief b);
std::pair<double, double> answer_likelihood(const QPartition& q, const Belief& b);
// Likelihood p(answer | D_i) for a diagnosis in the given partition: 1, 0 or 1/2.
double answer_factor(const QPartition& q, int index, Answer a);
Belief bayes_update(const Belief& b, const QPartition& q, Answer a);

}  // namespace kbdebug
