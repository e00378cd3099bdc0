#include "kbdebug/query.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "kbdebug/diagnosis.hpp"
#include "kbdebug/strategy.hpp"

namespace kbdebug {

bool query_preferred(double sa, const Query& a, double sb, const Query& b) {
  if (std::abs(sa - sb) > 1e-9) return sa < sb;
  if (a.formulas.size() != b.formulas.size()) return a.formulas.size() < b.formulas.size();
  return texts(a.formulas) < texts(b.formulas);
}

namespace {

IdSet complement(const std::vector<int>& ids, const IdSet& d) {
  IdSet kept;
  for (int id : ids)
    if (!d.count(id)) kept.insert(id);
  return kept;
}

// QuickXplain over index lists with a monotone predicate.
using Pred = std::function<bool(const std::vector<int>&)>;

std::vector<int> qxp(const Pred& holds, const std::vector<int>& b, bool delta, const std::vector<int>& c) {
  if (delta && holds(b)) return {};
  if (c.size() == 1) return c;
  std::size_t k = c.size() / 2;
  std::vector<int> c1(c.begin(), c.begin() + k), c2(c.begin() + k, c.end());
  std::vector<int> b1 = b;
  b1.insert(b1.end(), c1.begin(), c1.end());
  std::vector<int> d2 = qxp(holds, b1, !c1.empty(), c2);
  std::vector<int> b2 = b;
  b2.insert(b2.end(), d2.begin(), d2.end());
  std::vector<int> d1 = qxp(holds, b2, !d2.empty(), c1);
  d1.insert(d1.end(), d2.begin(), d2.end());
  return d1;
}

std::vector<IdSet> pick(const std::vector<IdSet>& leading, const std::vector<int>& idx) {
  std::vector<IdSet> out;
  for (int i : idx) out.push_back(leading[i]);
  return out;
}

}  // namespace

QueryEngine::QueryEngine(Dpi dpi, ReasonerOptions opt) : dpi_(std::move(dpi)), opt_(opt) {}

const std::vector<Formula>& QueryEngine::candidates() {
  if (candidates_) return *candidates_;
  std::vector<std::string> preds, inds;
  auto scan = [&](const Formula& f) {
    collect_unary_predicates(f, preds);
    collect_individuals(f, inds);
  };
  for (const auto& a : dpi_.kb) scan(a.formula);
  for (const auto& a : dpi_.background) scan(a.formula);
  for (const auto* ts : {&dpi_.positive_tests, &dpi_.negative_tests})
    for (const auto& t : *ts)
      for (const auto& f : t.formulas) scan(f);
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  std::sort(inds.begin(), inds.end());
  inds.erase(std::unique(inds.begin(), inds.end()), inds.end());

  std::vector<Formula> asserts, subs;
  if (dpi_.entailment_types.assertions)
    for (const auto& p : preds)
      for (const auto& a : inds) {
        Formula f;
        f.kind = FormulaKind::ConceptAssertion;
        f.lhs = Concept::atom(p);
        f.individuals = {a};
        asserts.push_back(f);
      }
  if (dpi_.entailment_types.subsumptions)
    for (const auto& p : preds)
      for (const auto& q : preds) {
        if (p == q) continue;
        Formula f;
        f.kind = FormulaKind::Subsumption;
        f.lhs = Concept::atom(p);
        f.rhs = Concept::atom(q);
        subs.push_back(f);
      }
  auto by_text = [](const Formula& a, const Formula& b) { return to_string(a) < to_string(b); };
  std::sort(asserts.begin(), asserts.end(), by_text);
  std::sort(subs.begin(), subs.end(), by_text);

  FormulaList bg = theory_of(dpi_, {});
  std::vector<Formula> out;
  for (auto* group : {&asserts, &subs})
    for (const auto& f : *group)
      if (!entails(bg, {&f}, opt_)) out.push_back(f);
  candidates_ = std::move(out);
  return *candidates_;
}

const std::vector<Formula>& QueryEngine::entailments(const IdSet& diag) {
  auto it = entailed_.find(diag);
  if (it != entailed_.end()) return it->second;
  FormulaList k = theory_of(dpi_, complement(dpi_.kb_ids(), diag));
  std::vector<Formula> out;
  for (const auto& f : candidates())
    if (entails(k, {&f}, opt_)) out.push_back(f);
  return entailed_.emplace(diag, std::move(out)).first->second;
}

std::vector<Formula> QueryEngine::common_entailments(const std::vector<IdSet>& seed) {
  if (seed.empty()) throw std::invalid_argument("seed must be non-empty");
  std::vector<Formula> out = entailments(seed[0]);
  for (std::size_t i = 1; i < seed.size() && !out.empty(); ++i) {
    const auto& e = entailments(seed[i]);
    std::erase_if(out, [&](const Formula& f) { return std::find(e.begin(), e.end(), f) == e.end(); });
  }
  return out;
}

QueryEngine::Verdict QueryEngine::verdict(const std::vector<Formula>& q, const IdSet& diag) {
  auto key = std::make_pair(texts(q), diag);
  auto it = verdicts_.find(key);
  if (it != verdicts_.end()) return it->second;
  FormulaList k = theory_of(dpi_, complement(dpi_.kb_ids(), diag));
  Verdict v{entails(k, refs(q), opt_), false};
  if (!v.entailed) {
    for (const auto& f : q) k.push_back(&f);
    v.invalid = !validity(k, dpi_.requirements, dpi_.negative_tests, opt_, true).valid();
  }
  verdicts_.emplace(std::move(key), v);
  return v;
}

QPartition QueryEngine::classify(const std::vector<Formula>& q, const std::vector<IdSet>& leading) {
  if (q.empty()) throw std::invalid_argument("query must be non-empty");
  QPartition p;
  for (std::size_t i = 0; i < leading.size(); ++i) {
    Verdict v = verdict(q, leading[i]);
    int idx = static_cast<int>(i);
    if (v.entailed) p.d_plus.push_back(idx);
    else if (v.invalid) p.d_minus.push_back(idx);
    else p.d_zero.push_back(idx);
  }
  return p;
}

bool QueryEngine::preserved(const std::vector<Formula>& s, const QPartition& part,
                            const std::vector<IdSet>& leading) {
  if (s.empty()) return false;
  // members of D+ entail every subset, only D- and D0 need re-checking
  for (int i : part.d_minus)
    if (!verdict(s, leading[i]).invalid) return false;
  for (int i : part.d_zero)
    if (verdict(s, leading[i]).entailed) return false;
  return true;
}

Query QueryEngine::minimize(const Query& q, const QPartition& part, const std::vector<IdSet>& leading) {
  const auto& fs = q.formulas;
  auto subset = [&](const std::vector<int>& idx) {
    std::vector<int> s = idx;
    std::sort(s.begin(), s.end());
    std::vector<Formula> out;
    for (int i : s) out.push_back(fs[i]);
    return out;
  };
  Pred holds = [&](const std::vector<int>& idx) { return preserved(subset(idx), part, leading); };
  std::vector<int> all(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) all[i] = static_cast<int>(i);
  if (fs.size() <= 1 || !holds(all)) return {fs, true};
  return {subset(qxp(holds, {}, false, all)), true};
}

std::vector<PoolEntry> QueryEngine::generate_pool(const std::vector<IdSet>& leading) {
  std::size_t n = leading.size();
  if (n > 12) throw SizeGuardExceeded("query pool limited to 12 leading diagnoses");
  std::vector<PoolEntry> pool;
  if (n < 2) return pool;
  std::set<QPartition> seen;
  std::set<std::vector<std::string>> tried;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) idx.push_back(static_cast<int>(i));
    std::vector<Formula> x = common_entailments(pick(leading, idx));
    if (x.empty() || !tried.insert(texts(x)).second) continue;
    QPartition part = classify(x, leading);
    if (part.d_plus.empty() || part.d_minus.empty()) continue;
    if (!seen.insert(part).second) continue;
    pool.push_back({minimize({x, false}, part, leading), part});
  }
  return pool;
}

std::optional<PoolEntry> QueryEngine::ckk_search(const std::vector<IdSet>& leading, const Belief& belief,
                                                 double gamma, CkkStats* stats) {
  CkkStats local;
  CkkStats& st = stats ? *stats : local;
  std::size_t n = leading.size();
  if (n < 2) return std::nullopt;
  if (n > 12) throw SizeGuardExceeded("query search limited to 12 leading diagnoses");

  struct Num {
    double v;
    std::vector<int> a, b;
  };
  std::vector<Num> start;
  for (std::size_t i = 0; i < n; ++i) start.push_back({belief[i], {static_cast<int>(i)}, {}});
  auto order = [](const Num& x, const Num& y) {
    if (x.v != y.v) return x.v > y.v;
    return x.a < y.a;
  };
  std::stable_sort(start.begin(), start.end(), order);

  std::optional<PoolEntry> best;
  double best_score = 0.0;
  std::map<std::vector<int>, bool> done;
  std::map<QPartition, PoolEntry> minimized;

  auto evaluate = [&](std::vector<int> seed) -> std::optional<std::pair<double, PoolEntry>> {
    std::sort(seed.begin(), seed.end());
    if (seed.empty() || done.count(seed)) return std::nullopt;
    done[seed] = true;
    ++st.seeds_evaluated;
    std::vector<Formula> x = common_entailments(pick(leading, seed));
    if (x.empty()) return std::nullopt;
    QPartition part = classify(x, leading);
    if (part.d_plus.empty() || part.d_minus.empty()) return std::nullopt;
    auto it = minimized.find(part);
    if (it == minimized.end())
      it = minimized.emplace(part, PoolEntry{minimize({x, false}, part, leading), part}).first;
    return std::make_pair(score_entropy(part, belief), it->second);
  };

  std::function<bool(std::vector<Num>)> dfs = [&](std::vector<Num> nums) -> bool {
    if (nums.size() == 1) {
      ++st.leaves;
      bool hit = false;
      for (const auto* side : {&nums[0].a, &nums[0].b}) {
        auto r = evaluate(*side);
        if (!r) continue;
        if (!best || query_preferred(r->first, r->second.query, best_score, best->query)) {
          best = r->second;
          best_score = r->first;
        }
        if (r->first <= gamma) hit = true;
      }
      return hit;
    }
    Num x = nums[0], y = nums[1];
    std::vector<Num> rest(nums.begin() + 2, nums.end());
    // differencing first (Karmarkar-Karp), then the sum branch
    Num diff{x.v - y.v, x.a, x.b};
    diff.a.insert(diff.a.end(), y.b.begin(), y.b.end());
    diff.b.insert(diff.b.end(), y.a.begin(), y.a.end());
    Num sum{x.v + y.v, x.a, x.b};
    sum.a.insert(sum.a.end(), y.a.begin(), y.a.end());
    sum.b.insert(sum.b.end(), y.b.begin(), y.b.end());
    for (Num* branch : {&diff, &sum}) {
      std::vector<Num> next = rest;
      next.insert(std::upper_bound(next.begin(), next.end(), *branch, order), *branch);
      if (dfs(std::move(next))) return true;
    }
    return false;
  };
  st.early_stop = dfs(start);
  return best;
}

std::vector<Formula> common_entailments(const Dpi& dpi, const std::vector<IdSet>& seed) {
  return QueryEngine(dpi).common_entailments(seed);
}

QPartition classify_partition(const Dpi& dpi, const std::vector<Formula>& q, const std::vector<IdSet>& leading) {
  return QueryEngine(dpi).classify(q, leading);
}

std::vector<PoolEntry> generate_query_pool(const Dpi& dpi, const std::vector<IdSet>& leading) {
  return QueryEngine(dpi).generate_pool(leading);
}

}  // namespace kbdebug
