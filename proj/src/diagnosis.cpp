#include "kbdebug/diagnosis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace kbdebug {

bool is_subset(const IdSet& a, const IdSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint(const IdSet& a, const IdSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i; else ++j;
  }
  return true;
}

DiagnosisProblem::DiagnosisProblem(Dpi dpi, ReasonerOptions opt)
    : dpi_(std::move(dpi)), opt_(opt), ids_(dpi_.kb_ids()) {}

bool DiagnosisProblem::valid_kept(const IdSet& kept) {
  auto it = cache_.find(kept);
  if (it != cache_.end()) return it->second;
  ++calls_;
  bool v = validity(theory_of(dpi_, kept), dpi_.requirements, dpi_.negative_tests, opt_, true).valid();
  cache_.emplace(kept, v);
  return v;
}

bool DiagnosisProblem::is_diagnosis(const IdSet& removed) {
  IdSet kept;
  for (int id : ids_)
    if (!removed.count(id)) kept.insert(id);
  return valid_kept(kept);
}

bool DiagnosisProblem::is_conflict(const IdSet& subset) { return !valid_kept(subset); }

bool DiagnosisProblem::is_minimal_diagnosis(const IdSet& d) {
  if (!is_diagnosis(d)) return false;
  for (int a : d) {
    IdSet s = d;
    s.erase(a);
    if (is_diagnosis(s)) return false;
  }
  return true;
}

bool DiagnosisProblem::is_minimal_conflict(const IdSet& c) {
  if (c.empty() || !is_conflict(c)) return false;
  for (int a : c) {
    IdSet s = c;
    s.erase(a);
    if (is_conflict(s)) return false;
  }
  return true;
}

namespace {

double prob_of(const AxiomProbs& probs, int id) {
  auto it = probs.find(id);
  return it == probs.end() ? 0.001 : it->second;
}

IdSet to_set(const std::vector<int>& v) { return IdSet(v.begin(), v.end()); }

IdSet unite(IdSet a, const std::vector<int>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

std::vector<int> qxp(DiagnosisProblem& p, const IdSet& b, bool delta, const std::vector<int>& c) {
  if (delta && p.is_conflict(b)) return {};
  if (c.size() == 1) return c;
  std::size_t k = c.size() / 2;
  std::vector<int> c1(c.begin(), c.begin() + k), c2(c.begin() + k, c.end());
  std::vector<int> d2 = qxp(p, unite(b, c1), !c1.empty(), c2);
  std::vector<int> d1 = qxp(p, unite(b, d2), !d2.empty(), c1);
  d1.insert(d1.end(), d2.begin(), d2.end());
  return d1;
}

std::vector<int> find_diag(DiagnosisProblem& p, const IdSet& d, bool delta, const std::vector<int>& o) {
  if (delta && p.is_diagnosis(d)) return {};
  if (o.size() == 1) return o;
  std::size_t k = o.size() / 2;
  std::vector<int> o1(o.begin(), o.begin() + k), o2(o.begin() + k, o.end());
  std::vector<int> d2 = find_diag(p, unite(d, o1), !o1.empty(), o2);
  std::vector<int> d1 = find_diag(p, unite(d, d2), !d2.empty(), o1);
  // discovery order: the right half settles first
  d2.insert(d2.end(), d1.begin(), d1.end());
  return d2;
}

}  // namespace

double path_probability(const IdSet& d, const std::vector<int>& kb, const AxiomProbs& probs) {
  double r = 1.0;
  for (int id : kb) {
    double q = prob_of(probs, id);
    r *= d.count(id) ? q : 1.0 - q;
  }
  return r;
}

bool better(double pa, const IdSet& a, double pb, const IdSet& b) {
  double scale = std::max(std::abs(pa), std::abs(pb));
  if (std::abs(pa - pb) > 1e-12 * scale) return pa > pb;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::optional<IdSet> quick_xplain(DiagnosisProblem& p, const std::vector<int>& candidates) {
  if (!p.is_conflict(to_set(candidates))) return std::nullopt;
  if (p.is_conflict({})) throw InadmissibleDpi();
  return to_set(qxp(p, {}, false, candidates));
}

std::optional<ConflictSet> quick_xplain(DiagnosisProblem& p) {
  auto c = quick_xplain(p, p.kb_ids());
  if (!c) return std::nullopt;
  return ConflictSet{*c, true};
}

std::optional<ConflictSet> quick_xplain(const Dpi& dpi, const ReasonerOptions& opt) {
  DiagnosisProblem p(dpi, opt);
  return quick_xplain(p);
}

HsTreeResult hs_tree(DiagnosisProblem& p, const AxiomProbs& probs, std::size_t n,
                     std::optional<std::chrono::steady_clock::time_point> deadline) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!p.admissible()) throw InadmissibleDpi();
  struct Node {
    double prob;
    IdSet path;
  };
  auto cmp = [](const Node& a, const Node& b) { return better(a.prob, a.path, b.prob, b.path); };
  std::set<Node, decltype(cmp)> open(cmp);
  std::set<IdSet> generated;
  HsTreeResult out;
  const auto& kb = p.kb_ids();

  open.insert({path_probability({}, kb, probs), {}});
  generated.insert({});
  std::vector<IdSet> found;
  while (!open.empty() && found.size() < n) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      out.complete = false;
      break;
    }
    Node node = *open.begin();
    open.erase(open.begin());
    bool closed = false;
    for (const auto& d : found)
      if (is_subset(d, node.path)) closed = true;
    if (closed) continue;

    const IdSet* label = nullptr;
    for (const auto& c : out.conflicts)
      if (disjoint(c, node.path)) {
        label = &c;
        break;
      }
    if (!label) {
      std::vector<int> cand;
      for (int id : kb)
        if (!node.path.count(id)) cand.push_back(id);
      auto c = quick_xplain(p, cand);
      if (!c) {
        // only report paths that are subset-minimal (guards against p >= 0.5 orderings)
        if (p.is_minimal_diagnosis(node.path)) found.push_back(node.path);
        continue;
      }
      out.conflicts.push_back(*c);
      label = &out.conflicts.back();
    }
    IdSet lab = *label;
    for (int a : lab) {
      IdSet child = node.path;
      child.insert(a);
      if (!generated.insert(child).second) continue;
      bool sup = false;
      for (const auto& d : found)
        if (is_subset(d, child)) sup = true;
      if (sup) continue;
      open.insert({path_probability(child, kb, probs), child});
    }
  }
  for (const auto& d : found) out.diagnoses.push_back({d, path_probability(d, kb, probs), 0.0});
  std::stable_sort(out.diagnoses.begin(), out.diagnoses.end(), [](const Diagnosis& a, const Diagnosis& b) {
    return better(a.prior, a.axiom_ids, b.prior, b.axiom_ids);
  });
  return out;
}

std::vector<Diagnosis> hs_tree_diagnoses(DiagnosisProblem& p, const AxiomProbs& probs, std::size_t n) {
  return hs_tree(p, probs, n).diagnoses;
}

std::optional<std::vector<int>> inv_qx(DiagnosisProblem& p, const IdSet& moved, const AxiomProbs& probs) {
  std::vector<int> cand;
  for (int id : p.kb_ids())
    if (!moved.count(id)) cand.push_back(id);
  // ranking heuristic: most probably faulty first
  std::stable_sort(cand.begin(), cand.end(),
                   [&](int a, int b) { return prob_of(probs, a) > prob_of(probs, b); });
  if (!p.is_diagnosis(to_set(cand))) return std::nullopt;
  if (cand.empty()) return std::vector<int>{};
  return find_diag(p, {}, true, cand);
}

std::vector<IdSet> inv_hs_tree(DiagnosisProblem& p, std::size_t m, const std::vector<IdSet>& seeds,
                               const AxiomProbs& probs, InvHsTreeStats* stats) {
  if (m == 0) throw std::invalid_argument("m must be positive");
  InvHsTreeStats local;
  InvHsTreeStats& st = stats ? *stats : local;
  std::vector<IdSet> pool;
  for (const auto& s : seeds)
    if (std::find(pool.begin(), pool.end(), s) == pool.end()) pool.push_back(s);
  std::vector<IdSet> stack{IdSet{}};
  // closed path sets: the same H reached along another edge order adds nothing
  std::set<IdSet> visited;
  while (!stack.empty() && pool.size() < m) {
    st.max_alive = std::max(st.max_alive, stack.size());
    IdSet h = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(h).second) continue;
    const IdSet* label = nullptr;
    for (const auto& d : pool)
      if (disjoint(d, h)) {
        label = &d;
        break;
      }
    IdSet lab;
    if (label) {
      ++st.reused;
      lab = *label;
    } else {
      auto d = inv_qx(p, h, probs);
      if (!d) {
        ++st.pruned;
        continue;
      }
      ++st.computed;
      lab = to_set(*d);
      pool.push_back(lab);
      if (pool.size() >= m) break;
    }
    // push in reverse so the smallest id is expanded first
    for (auto it = lab.rbegin(); it != lab.rend(); ++it) {
      IdSet child = h;
      child.insert(*it);
      if (!visited.count(child)) stack.push_back(std::move(child));
    }
  }
  if (pool.size() > m) pool.resize(m);
  return pool;
}

std::vector<IdSet> brute_force_minimal_diagnoses(DiagnosisProblem& p) {
  const auto& ids = p.kb_ids();
  if (ids.size() > 16) throw SizeGuardExceeded("brute force limited to 16 kb axioms");
  std::vector<IdSet> out;
  std::size_t n = ids.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    IdSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.insert(ids[i]);
    if (p.is_minimal_diagnosis(s)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const IdSet& a, const IdSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<IdSet> brute_force_minimal_conflicts(DiagnosisProblem& p) {
  const auto& ids = p.kb_ids();
  if (ids.size() > 16) throw SizeGuardExceeded("brute force limited to 16 kb axioms");
  std::vector<IdSet> out;
  std::size_t n = ids.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    IdSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.insert(ids[i]);
    if (p.is_minimal_conflict(s)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const IdSet& a, const IdSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<IdSet> minimal_hitting_sets(const std::vector<IdSet>& family) {
  IdSet u;
  for (const auto& s : family) u.insert(s.begin(), s.end());
  std::vector<int> ids(u.begin(), u.end());
  if (ids.size() > 20) throw SizeGuardExceeded("hitting set enumeration limited to 20 elements");
  std::vector<IdSet> hits;
  for (std::size_t mask = 0; mask < (std::size_t{1} << ids.size()); ++mask) {
    IdSet h;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (mask >> i & 1) h.insert(ids[i]);
    bool ok = std::all_of(family.begin(), family.end(), [&](const IdSet& s) { return !disjoint(s, h); });
    if (ok) hits.push_back(h);
  }
  std::vector<IdSet> out;
  for (const auto& h : hits) {
    bool minimal = std::none_of(hits.begin(), hits.end(), [&](const IdSet& o) {
      return o.size() < h.size() && is_subset(o, h);
    });
    if (minimal) out.push_back(h);
  }
  std::sort(out.begin(), out.end(), [](const IdSet& a, const IdSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace kbdebug
