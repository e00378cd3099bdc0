#include "kbdebug/sat.hpp"

#include <algorithm>
#include <cstdlib>

namespace kbdebug {

int SatSolver::new_var() {
  assign_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  return num_vars();
}

void SatSolver::add_clause(std::vector<int> lits) {
  std::vector<int> c;
  c.reserve(lits.size());
  for (int l : lits) {
    while (std::abs(l) > num_vars()) new_var();
    c.push_back(code(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] == neg(c[i - 1])) return;  // tautology
  if (c.empty()) {
    empty_clause_ = true;
    return;
  }
  if (c.size() == 1) {
    units_.push_back(c[0]);
    return;
  }
  clauses_.push_back(std::move(c));
  attach(static_cast<int>(clauses_.size()) - 1);
}

void SatSolver::attach(int ci) {
  const auto& c = clauses_[ci];
  watches_[c[0]].push_back(ci);
  watches_[c[1]].push_back(ci);
}

void SatSolver::enqueue(int c, int reason) {
  int v = var_of(c);
  assign_[v] = (c & 1) ? 0 : 1;
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(c);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    int false_lit = neg(trail_[qhead_++]);
    auto& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& c = clauses_[ci];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void SatSolver::analyze(int confl, std::vector<int>& learnt, int& bt_level) {
  int current = static_cast<int>(trail_lim_.size());
  learnt.assign(1, 0);
  int pending = 0;
  int p = -1;
  std::size_t idx = trail_.size();
  do {
    for (int q : clauses_[confl]) {
      if (p >= 0 && q == p) continue;
      int v = var_of(q);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      activity_[v] += bump_;
      if (level_[v] == current)
        ++pending;
      else
        learnt.push_back(q);
    }
    while (!seen_[var_of(trail_[--idx])]) {
    }
    p = trail_[idx];
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = neg(p);

  bt_level = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int lv = level_[var_of(learnt[i])];
    if (lv > bt_level) {
      bt_level = lv;
      max_i = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (int q : learnt) seen_[var_of(q)] = 0;
  bump_ *= 1.05;
}

void SatSolver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[level]);)
    assign_[var_of(trail_[i])] = -1;
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

int SatSolver::pick_branch() const {
  int best = 0;
  double act = -1.0;
  for (int v = 1; v <= num_vars(); ++v)
    if (assign_[v] < 0 && activity_[v] > act) {
      act = activity_[v];
      best = v;
    }
  return best;
}

bool SatSolver::solve() {
  if (empty_clause_) return false;
  backtrack(0);
  for (int v = 1; v <= num_vars(); ++v) assign_[v] = -1;
  trail_.clear();
  qhead_ = 0;
  for (int u : units_) {
    int val = value(u);
    if (val == 0) return false;
    if (val < 0) enqueue(u, -1);
  }
  for (;;) {
    int confl = propagate();
    if (confl >= 0) {
      ++conflicts_;
      if (trail_lim_.empty()) return false;
      std::vector<int> learnt;
      int bt = 0;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        units_.push_back(learnt[0]);
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(learnt);
        int ci = static_cast<int>(clauses_.size()) - 1;
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }
    int v = pick_branch();
    if (v == 0) return true;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(code(-v), -1);
  }
}

}  // namespace kbdebug
