#include "kbdebug/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kbdebug {

using nlohmann::json;

FaultModel fault_model_from_json(const json& j) {
  FaultModel m;
  if (j.contains("elements"))
    for (auto& [k, v] : j["elements"].items()) m.element_probs[k] = v.get<double>();
  m.default_axiom_prob = j.value("default", 0.001);
  if (j.contains("axioms"))
    for (auto& [k, v] : j["axioms"].items()) m.axiom_overrides[std::stoi(k)] = v.get<double>();
  auto check = [](double p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("fault probabilities must lie in [0,1)");
  };
  for (auto& [k, v] : m.element_probs) check(v);
  for (auto& [k, v] : m.axiom_overrides) check(v);
  check(m.default_axiom_prob);
  return m;
}

json fault_model_to_json(const FaultModel& m) {
  json j;
  j["elements"] = json::object();
  for (auto& [k, v] : m.element_probs) j["elements"][k] = v;
  j["default"] = m.default_axiom_prob;
  if (!m.axiom_overrides.empty()) {
    j["axioms"] = json::object();
    for (auto& [k, v] : m.axiom_overrides) j["axioms"][std::to_string(k)] = v;
  }
  return j;
}

double axiom_fault_prob(const Axiom& ax, const FaultModel& m) {
  if (auto it = m.axiom_overrides.find(ax.id); it != m.axiom_overrides.end()) return it->second;
  double keep = 1.0;
  bool known = false;
  for (const auto& [se, c] : ax.counts) {
    auto it = m.element_probs.find(se);
    if (it == m.element_probs.end()) continue;
    known = true;
    keep *= std::pow(1.0 - it->second, c);
  }
  // nothing the model has a rate for: fall back to the flat default
  return known ? 1.0 - keep : m.default_axiom_prob;
}

AxiomProbs axiom_fault_probs(const Dpi& dpi, const FaultModel& m) {
  AxiomProbs out;
  for (const auto& a : dpi.kb) out[a.id] = axiom_fault_prob(a, m);
  return out;
}

double diagnosis_prior(const IdSet& diag, const std::vector<Axiom>& kb, const AxiomProbs& probs) {
  double r = 1.0;
  for (const auto& a : kb) {
    auto it = probs.find(a.id);
    double p = it == probs.end() ? 0.0 : it->second;
    r *= diag.count(a.id) ? p : 1.0 - p;
  }
  return r;
}

Belief normalize(Belief b) {
  double s = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("cannot normalize an all-zero belief");
  for (auto& x : b) x /= s;
  return b;
}

std::pair<double, double> answer_likelihood(const QPartition& q, const Belief& b) {
  double plus = 0, minus = 0, zero = 0;
  for (int i : q.d_plus) plus += b[i];
  for (int i : q.d_minus) minus += b[i];
  for (int i : q.d_zero) zero += b[i];
  double total = plus + minus + zero;
  if (total > 0) {
    plus /= total;
    zero /= total;
  }
  double yes = plus + zero / 2.0;
  return {yes, 1.0 - yes};
}

double answer_factor(const QPartition& q, int index, Answer a) {
  auto in = [&](const std::vector<int>& v) { return std::find(v.begin(), v.end(), index) != v.end(); };
  if (in(q.d_zero)) return 0.5;
  if (in(q.d_plus)) return a == Answer::Yes ? 1.0 : 0.0;
  if (in(q.d_minus)) return a == Answer::No ? 1.0 : 0.0;
  return 1.0;
}

Belief bayes_update(const Belief& b, const QPartition& q, Answer a) {
  if (a == Answer::Skip) return b;
  Belief out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] * answer_factor(q, static_cast<int>(i), a);
  double s = std::accumulate(out.begin(), out.end(), 0.0);
  if (!(s > 0.0)) throw ContradictionError();
  for (auto& x : out) x /= s;
  return out;
}

}  // namespace kbdebug
