#pragma once

#include <cstdint>
#include <vector>

namespace kbdebug {

// Small CDCL solver: watched literals, 1-UIP learning, non-chronological
// backjumping. Literals use DIMACS convention (+v / -v, v >= 1).
class SatSolver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()) - 1; }
  void add_clause(std::vector<int> lits);
  bool solve();
  // Valid after a satisfiable solve().
  bool model_value(int var) const { return assign_[var] == 1; }

  std::uint64_t conflicts() const { return conflicts_; }

 private:
  static int code(int lit) { return lit > 0 ? 2 * lit : 2 * -lit + 1; }
  static int neg(int c) { return c ^ 1; }
  static int var_of(int c) { return c >> 1; }
  int value(int c) const {
    int a = assign_[var_of(c)];
    if (a < 0) return -1;
    return (c & 1) ? 1 - a : a;
  }

  void enqueue(int c, int reason);
  int propagate();
  void analyze(int confl, std::vector<int>& learnt, int& bt_level);
  void backtrack(int level);
  int pick_branch() const;
  void attach(int ci);

  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_{2};
  std::vector<int> units_;
  bool empty_clause_ = false;

  std::vector<int> assign_{-1};
  std::vector<int> level_{0};
  std::vector<int> reason_{-1};
  std::vector<double> activity_{0.0};
  std::vector<char> seen_{0};
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double bump_ = 1.0;
  std::uint64_t conflicts_ = 0;
};

}  // namespace kbdebug
