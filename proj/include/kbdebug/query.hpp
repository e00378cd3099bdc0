#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kbdebug/probability.hpp"

namespace kbdebug {

struct Query {
  std::vector<Formula> formulas;
  bool minimized = false;
};

struct PoolEntry {
  Query query;
  QPartition partition;
};

// Pool ordering key: score asc, fewer formulas, then lexicographic text.
bool query_preferred(double sa, const Query& a, double sb, const Query& b);

struct CkkStats {
  std::size_t leaves = 0;
  std::size_t seeds_evaluated = 0;
  bool early_stop = false;
};

// Query generation against one fixed instance. Entailments per diagnosis and
// classification results are cached for the engine's lifetime.
class QueryEngine {
 public:
  explicit QueryEngine(Dpi dpi, ReasonerOptions opt = {});

  const Dpi& dpi() const { return dpi_; }

  // Candidate atomic entailments (assertions first, then subsumptions), minus
  // those already entailed by B ∪ ⋃P.
  const std::vector<Formula>& candidates();
  const std::vector<Formula>& entailments(const IdSet& diag);
  std::vector<Formula> common_entailments(const std::vector<IdSet>& seed);

  QPartition classify(const std::vector<Formula>& q, const std::vector<IdSet>& leading);
  // Subset-minimal query with the same partition (QX over "partition preserved").
  Query minimize(const Query& q, const QPartition& part, const std::vector<IdSet>& leading);

  // One minimized query per distinct partition; 2 <= |leading| <= 12.
  std::vector<PoolEntry> generate_pool(const std::vector<IdSet>& leading);

  // Seeds visited in Karmarkar-Karp differencing order; stops at score <= gamma.
  std::optional<PoolEntry> ckk_search(const std::vector<IdSet>& leading, const Belief& belief,
                                      double gamma, CkkStats* stats = nullptr);

 private:
  struct Verdict {
    bool entailed;
    bool invalid;
  };
  Verdict verdict(const std::vector<Formula>& q, const IdSet& diag);
  bool preserved(const std::vector<Formula>& s, const QPartition& part, const std::vector<IdSet>& leading);

  Dpi dpi_;
  ReasonerOptions opt_;
  std::optional<std::vector<Formula>> candidates_;
  std::map<IdSet, std::vector<Formula>> entailed_;
  std::map<std::pair<std::vector<std::string>, IdSet>, Verdict> verdicts_;
};

// Free-function forms of the module contract.
std::vector<Formula> common_entailments(const Dpi& dpi, const std::vector<IdSet>& seed);
QPartition classify_partition(const Dpi& dpi, const std::vector<Formula>& q, const std::vector<IdSet>& leading);
std::vector<PoolEntry> generate_query_pool(const Dpi& dpi, const std::vector<IdSet>& leading);

}  // namespace kbdebug
