#include "kbdebug/reasoner.hpp"

#include <algorithm>

#include "kbdebug/sat.hpp"

namespace kbdebug {

namespace {

GroundRequest request(const FormulaList& kb, const ReasonerOptions& opt) {
  GroundRequest req;
  req.witness_budget = opt.witness_budget;
  req.theory.reserve(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) req.theory.push_back({kb[i], "f" + std::to_string(i)});
  return req;
}

bool satisfiable(const GroundTheory& t, const std::vector<int>& units = {}) {
  SatSolver s;
  for (int v = 0; v < t.num_vars(); ++v) s.new_var();
  for (const auto& c : t.clauses) s.add_clause(c);
  for (int u : units) s.add_clause({u});
  return s.solve();
}

}  // namespace

FormulaList refs(const std::vector<Formula>& fs) {
  FormulaList out;
  for (const auto& f : fs) out.push_back(&f);
  return out;
}

bool is_consistent(const FormulaList& kb, const ReasonerOptions& opt) {
  return satisfiable(ground(request(kb, opt)));
}

bool entails(const FormulaList& kb, const FormulaList& query, const ReasonerOptions& opt) {
  if (query.empty()) return true;
  GroundRequest req = request(kb, opt);
  req.negated_goal = query;
  return !satisfiable(ground(req));
}

std::set<std::string> incoherent_predicates(const FormulaList& kb, const ReasonerOptions& opt) {
  std::vector<std::string> preds;
  for (const auto* f : kb) collect_unary_predicates(*f, preds);
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  std::set<std::string> out;
  if (preds.empty()) return out;

  GroundRequest req = request(kb, opt);
  const std::string fresh = "_c";
  req.extra_constants.push_back(fresh);
  GroundTheory t = ground(req);
  for (const auto& p : preds) {
    auto it = t.variables.find(atom_name(p, {fresh}));
    // an atom absent from every clause is unconstrained
    if (it == t.variables.end()) {
      if (!satisfiable(t)) out.insert(p);
      continue;
    }
    if (!satisfiable(t, {it->second})) out.insert(p);
  }
  return out;
}

bool is_consistent(const std::vector<Axiom>& axioms, const std::vector<std::vector<Formula>>& extra,
                   const ReasonerOptions& opt) {
  FormulaList kb;
  for (const auto& a : axioms) kb.push_back(&a.formula);
  for (const auto& fs : extra)
    for (const auto& f : fs) kb.push_back(&f);
  return is_consistent(kb, opt);
}

bool entails(const std::vector<Axiom>& axioms, const std::vector<Formula>& query,
             const ReasonerOptions& opt) {
  FormulaList kb;
  for (const auto& a : axioms) kb.push_back(&a.formula);
  return entails(kb, refs(query), opt);
}

std::set<std::string> is_coherent(const std::vector<Axiom>& axioms, const ReasonerOptions& opt) {
  FormulaList kb;
  for (const auto& a : axioms) kb.push_back(&a.formula);
  return incoherent_predicates(kb, opt);
}

ValidityReport validity(const FormulaList& kb, const Requirements& req,
                        const std::vector<TestCase>& negatives, const ReasonerOptions& opt,
                        bool stop_early) {
  ValidityReport r;
  r.coherence_required = req.coherence;
  r.consistent = is_consistent(kb, opt);
  if (!r.consistent && stop_early) return r;
  if (req.coherence) {
    r.incoherent_predicates = incoherent_predicates(kb, opt);
    if (!r.incoherent_predicates.empty() && stop_early) return r;
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (entails(kb, refs(negatives[i].formulas), opt)) {
      r.violated_negative_tests.insert(static_cast<int>(i));
      if (stop_early) return r;
    }
  }
  return r;
}

FormulaList theory_of(const Dpi& dpi, const IdSet& kept) {
  FormulaList kb;
  for (const auto& a : dpi.kb)
    if (kept.count(a.id)) kb.push_back(&a.formula);
  for (const auto& a : dpi.background) kb.push_back(&a.formula);
  for (const auto& t : dpi.positive_tests)
    for (const auto& f : t.formulas) kb.push_back(&f);
  return kb;
}

ValidityReport check_validity(const Dpi& dpi, const IdSet& removed, const ReasonerOptions& opt) {
  for (int id : removed)
    if (!dpi.has_kb_id(id)) throw std::out_of_range("unknown axiom id " + std::to_string(id));
  IdSet kept;
  for (const auto& a : dpi.kb)
    if (!removed.count(a.id)) kept.insert(a.id);
  return validity(theory_of(dpi, kept), dpi.requirements, dpi.negative_tests, opt, false);
}

}  // namespace kbdebug
