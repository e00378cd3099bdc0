#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kbdebug/reasoner.hpp"

namespace kbdebug {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct ConflictSet {
  IdSet axiom_ids;
  bool minimal = true;
};

struct Diagnosis {
  IdSet axiom_ids;
  double prior = 0.0;
  double posterior = 0.0;
  bool operator==(const Diagnosis& o) const { return axiom_ids == o.axiom_ids; }
};

class InadmissibleDpi : public std::runtime_error {
 public:
  InadmissibleDpi() : std::runtime_error("no diagnosis exists: background and positive tests are invalid") {}
};

class SizeGuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Memoizing validity oracle over subsets of the kb part of one instance.
class DiagnosisProblem {
 public:
  explicit DiagnosisProblem(Dpi dpi, ReasonerOptions opt = {});

  const Dpi& dpi() const { return dpi_; }
  const ReasonerOptions& options() const { return opt_; }
  const std::vector<int>& kb_ids() const { return ids_; }

  // (O \ removed) ∪ B ∪ ⋃P meets R and entails no n ∈ N.
  bool is_diagnosis(const IdSet& removed);
  // subset ∪ B ∪ ⋃P violates R or entails some n ∈ N.
  bool is_conflict(const IdSet& subset);
  bool admissible() { return !is_conflict({}); }
  bool is_minimal_diagnosis(const IdSet& d);
  bool is_minimal_conflict(const IdSet& c);

  std::size_t reasoner_calls() const { return calls_; }

 private:
  bool valid_kept(const IdSet& kept);

  Dpi dpi_;
  ReasonerOptions opt_;
  std::vector<int> ids_;
  std::map<IdSet, bool> cache_;
  std::size_t calls_ = 0;
};

// Axiom fault probabilities by id. Missing ids count as 0.001.
using AxiomProbs = std::map<int, double>;

// Node weight of a path/diagnosis: ∏_{D} p · ∏_{O\D} (1-p).
double path_probability(const IdSet& d, const std::vector<int>& kb, const AxiomProbs& probs);

// Probability desc, cardinality asc, lexicographic id order.
bool better(double pa, const IdSet& a, double pb, const IdSet& b);

// Preferred minimal conflict among `candidates` (order matters), or none.
std::optional<IdSet> quick_xplain(DiagnosisProblem& p, const std::vector<int>& candidates);
std::optional<ConflictSet> quick_xplain(DiagnosisProblem& p);
std::optional<ConflictSet> quick_xplain(const Dpi& dpi, const ReasonerOptions& opt = {});

struct HsTreeResult {
  std::vector<Diagnosis> diagnoses;
  std::vector<IdSet> conflicts;
  bool complete = true;  // false when the deadline cut the search short
};

HsTreeResult hs_tree(DiagnosisProblem& p, const AxiomProbs& probs, std::size_t n,
                     std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt);
std::vector<Diagnosis> hs_tree_diagnoses(DiagnosisProblem& p, const AxiomProbs& probs, std::size_t n);

// Inv-QX on the kb axioms outside `moved_to_background`. Returns the diagnosis
// in recursion order, or nullopt for "no diagnosis exists".
std::optional<std::vector<int>> inv_qx(DiagnosisProblem& p, const IdSet& moved_to_background,
                                       const AxiomProbs& probs = {});

struct InvHsTreeStats {
  std::size_t reused = 0;
  std::size_t pruned = 0;
  std::size_t computed = 0;
  std::size_t max_alive = 0;
};

std::vector<IdSet> inv_hs_tree(DiagnosisProblem& p, std::size_t m, const std::vector<IdSet>& seeds,
                               const AxiomProbs& probs = {}, InvHsTreeStats* stats = nullptr);

// Exhaustive oracles, |kb| <= 16.
std::vector<IdSet> brute_force_minimal_diagnoses(DiagnosisProblem& p);
std::vector<IdSet> brute_force_minimal_conflicts(DiagnosisProblem& p);

// Minimal hitting sets of a set family (exhaustive over the union, test helper).
std::vector<IdSet> minimal_hitting_sets(const std::vector<IdSet>& family);

bool is_subset(const IdSet& a, const IdSet& b);
bool disjoint(const IdSet& a, const IdSet& b);

}  // namespace kbdebug
