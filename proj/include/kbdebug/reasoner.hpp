#pragma once

#include <set>
#include <string>
#include <vector>

#include "kbdebug/dpi.hpp"
#include "kbdebug/ground.hpp"

namespace kbdebug {

struct ReasonerOptions {
  int witness_budget = 1;
};

using FormulaList = std::vector<const Formula*>;

struct ValidityReport {
  bool consistent = true;
  std::set<std::string> incoherent_predicates;
  std::set<int> violated_negative_tests;
  bool coherence_required = false;

  bool valid() const {
    return consistent && (!coherence_required || incoherent_predicates.empty()) &&
           violated_negative_tests.empty();
  }
};

bool is_consistent(const FormulaList& kb, const ReasonerOptions& opt = {});
bool entails(const FormulaList& kb, const FormulaList& query, const ReasonerOptions& opt = {});
std::set<std::string> incoherent_predicates(const FormulaList& kb, const ReasonerOptions& opt = {});

// Axiom-level conveniences mirroring the module contract.
bool is_consistent(const std::vector<Axiom>& axioms,
                   const std::vector<std::vector<Formula>>& extra = {},
                   const ReasonerOptions& opt = {});
bool entails(const std::vector<Axiom>& axioms, const std::vector<Formula>& query,
             const ReasonerOptions& opt = {});
std::set<std::string> is_coherent(const std::vector<Axiom>& axioms, const ReasonerOptions& opt = {});

// Validity of K against requirements and negative tests. With `stop_early`
// the report is cut short at the first violation (enough for a yes/no verdict).
ValidityReport validity(const FormulaList& kb, const Requirements& req,
                        const std::vector<TestCase>& negatives, const ReasonerOptions& opt,
                        bool stop_early);

// Report over (O \ removed) ∪ B ∪ ⋃P. Throws std::out_of_range on unknown ids.
ValidityReport check_validity(const Dpi& dpi, const IdSet& removed, const ReasonerOptions& opt = {});

// (O restricted to `kept`) ∪ B ∪ ⋃P as formula pointers into dpi.
FormulaList theory_of(const Dpi& dpi, const IdSet& kept);
FormulaList refs(const std::vector<Formula>& fs);

}  // namespace kbdebug
