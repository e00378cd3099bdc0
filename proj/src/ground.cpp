#include "kbdebug/ground.hpp"

#include <algorithm>
#include <set>

namespace kbdebug {

std::string atom_name(const std::string& pred, const std::vector<std::string>& args) {
  if (args.empty()) return pred;
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
  return s + ")";
}

namespace {

// Propositional formula in negation normal form.
struct PF {
  enum Kind { Lit, True, False, And, Or } kind = True;
  int lit = 0;
  std::vector<PF> kids;

  static PF literal(int l) { return {Lit, l, {}}; }
  static PF constant(bool b) { return {b ? True : False, 0, {}}; }
};

PF combine(PF::Kind k, std::vector<PF> parts) {
  // And: True is neutral, False absorbing. Or: dually.
  PF::Kind neutral = k == PF::And ? PF::True : PF::False;
  PF::Kind absorbing = k == PF::And ? PF::False : PF::True;
  PF out{k, 0, {}};
  for (auto& p : parts) {
    if (p.kind == neutral) continue;
    if (p.kind == absorbing) return PF{absorbing, 0, {}};
    if (p.kind == k) {
      for (auto& q : p.kids) out.kids.push_back(std::move(q));
    } else {
      out.kids.push_back(std::move(p));
    }
  }
  if (out.kids.empty()) return PF{neutral, 0, {}};
  if (out.kids.size() == 1) return std::move(out.kids[0]);
  return out;
}

PF mk_and(std::vector<PF> p) { return combine(PF::And, std::move(p)); }
PF mk_or(std::vector<PF> p) { return combine(PF::Or, std::move(p)); }

class Builder {
 public:
  explicit Builder(GroundTheory& t) : t_(t) {}

  int var(const std::string& atom) {
    auto it = t_.variables.find(atom);
    if (it != t_.variables.end()) return it->second;
    int v = t_.next_var++;
    t_.variables.emplace(atom, v);
    return v;
  }

  PF atom(const std::string& pred, const std::vector<std::string>& args, bool positive) {
    int v = var(atom_name(pred, args));
    return PF::literal(positive ? v : -v);
  }

  // Concept `c` holds (positive) or fails (negative) at element x.
  PF at(const Concept& c, const std::string& x, bool positive) {
    switch (c.kind) {
      case ConceptKind::Atom: return atom(c.name, {x}, positive);
      case ConceptKind::Top: return PF::constant(positive);
      case ConceptKind::Bottom: return PF::constant(!positive);
      case ConceptKind::Not: return at(c.args[0], x, !positive);
      case ConceptKind::And:
      case ConceptKind::Or: {
        std::vector<PF> parts;
        for (const auto& a : c.args) parts.push_back(at(a, x, positive));
        bool conj = (c.kind == ConceptKind::And) == positive;
        return conj ? mk_and(std::move(parts)) : mk_or(std::move(parts));
      }
      case ConceptKind::Some:
      case ConceptKind::All: {
        bool exists = (c.kind == ConceptKind::Some) == positive;
        std::vector<PF> parts;
        for (const auto& y : t_.domain) {
          if (exists)
            parts.push_back(mk_and({atom(c.name, {x, y}, true), at(c.args[0], y, positive)}));
          else
            parts.push_back(mk_or({atom(c.name, {x, y}, false), at(c.args[0], y, positive)}));
        }
        return exists ? mk_or(std::move(parts)) : mk_and(std::move(parts));
      }
    }
    return PF::constant(true);
  }

  PF literal(const Literal& l, bool positive) {
    return atom(l.pred, l.args, l.positive == positive);
  }

  PF holds(const Formula& f) {
    std::vector<PF> parts;
    switch (f.kind) {
      case FormulaKind::Subsumption:
        for (const auto& x : t_.domain)
          parts.push_back(mk_or({at(f.lhs, x, false), at(f.rhs, x, true)}));
        return mk_and(std::move(parts));
      case FormulaKind::Equivalence:
        for (const auto& x : t_.domain) {
          parts.push_back(mk_or({at(f.lhs, x, false), at(f.rhs, x, true)}));
          parts.push_back(mk_or({at(f.rhs, x, false), at(f.lhs, x, true)}));
        }
        return mk_and(std::move(parts));
      case FormulaKind::Disjointness:
        for (const auto& x : t_.domain)
          parts.push_back(mk_or({at(f.lhs, x, false), at(f.rhs, x, false)}));
        return mk_and(std::move(parts));
      case FormulaKind::ConceptAssertion: return at(f.lhs, f.individuals[0], true);
      case FormulaKind::RoleAssertion: return atom(f.role, f.individuals, true);
      case FormulaKind::Clause:
        for (const auto& l : f.literals) parts.push_back(literal(l, true));
        return mk_or(std::move(parts));
    }
    return PF::constant(true);
  }

  // Negation of f; terminological formulas are refuted at the fresh constant c.
  PF fails(const Formula& f, const std::string& c) {
    std::vector<PF> parts;
    switch (f.kind) {
      case FormulaKind::Subsumption:
        return mk_and({at(f.lhs, c, true), at(f.rhs, c, false)});
      case FormulaKind::Equivalence:
        return mk_or({mk_and({at(f.lhs, c, true), at(f.rhs, c, false)}),
                      mk_and({at(f.rhs, c, true), at(f.lhs, c, false)})});
      case FormulaKind::Disjointness:
        return mk_and({at(f.lhs, c, true), at(f.rhs, c, true)});
      case FormulaKind::ConceptAssertion: return at(f.lhs, f.individuals[0], false);
      case FormulaKind::RoleAssertion: return atom(f.role, f.individuals, false);
      case FormulaKind::Clause:
        for (const auto& l : f.literals) parts.push_back(literal(l, false));
        return mk_and(std::move(parts));
    }
    return PF::constant(false);
  }

  void emit(const PF& f, const std::string& source) { emit(f, {}, source); }

 private:
  GroundTheory& t_;
  int tseitin_ = 0;

  void add(std::vector<int> clause, const std::string& source) {
    t_.clauses.push_back(std::move(clause));
    t_.provenance.push_back(source);
  }

  // Adds clauses for (prefix ∨ f).
  void emit(const PF& f, std::vector<int> prefix, const std::string& source) {
    switch (f.kind) {
      case PF::True: return;
      case PF::False: add(std::move(prefix), source); return;
      case PF::Lit:
        prefix.push_back(f.lit);
        add(std::move(prefix), source);
        return;
      case PF::And:
        for (const auto& k : f.kids) emit(k, prefix, source);
        return;
      case PF::Or: {
        std::vector<const PF*> compound;
        for (const auto& k : f.kids) {
          if (k.kind == PF::Lit)
            prefix.push_back(k.lit);
          else
            compound.push_back(&k);
        }
        if (compound.empty()) {
          add(std::move(prefix), source);
        } else if (compound.size() == 1) {
          // distribute the single conjunction over the literal part
          emit(*compound[0], std::move(prefix), source);
        } else {
          for (const PF* k : compound) {
            int t = var("_t" + std::to_string(tseitin_++));
            prefix.push_back(t);
            emit(*k, {-t}, source);
          }
          add(std::move(prefix), source);
        }
        return;
      }
    }
  }
};

}  // namespace

GroundTheory ground(const GroundRequest& req) {
  GroundTheory t;
  std::set<std::string> named;
  std::vector<std::string> buf;
  int quantifiers = 0;
  auto scan = [&](const Formula& f, const std::string& source) {
    if (quantifier_depth(f) > 1)
      throw GroundingError(source, "unsupported quantifier nesting depth " +
                                       std::to_string(quantifier_depth(f)) + " (max 1)");
    buf.clear();
    collect_individuals(f, buf);
    named.insert(buf.begin(), buf.end());
    quantifiers += quantifier_occurrences(f);
  };
  for (const auto& sf : req.theory) scan(*sf.formula, sf.source);
  for (const auto* f : req.negated_goal) scan(*f, "goal");

  t.domain.assign(named.begin(), named.end());
  std::vector<std::string> goal_consts;
  for (std::size_t i = 0; i < req.negated_goal.size(); ++i) {
    FormulaKind k = req.negated_goal[i]->kind;
    bool tbox = k == FormulaKind::Subsumption || k == FormulaKind::Equivalence ||
                k == FormulaKind::Disjointness;
    goal_consts.push_back(tbox ? "_q" + std::to_string(i) : std::string());
    if (tbox) t.domain.push_back(goal_consts.back());
  }
  for (const auto& c : req.extra_constants)
    if (std::find(t.domain.begin(), t.domain.end(), c) == t.domain.end()) t.domain.push_back(c);
  for (int i = 0; i < quantifiers * req.witness_budget; ++i) t.domain.push_back("_w" + std::to_string(i));
  if (t.domain.empty() && !(req.theory.empty() && req.negated_goal.empty())) t.domain.push_back("_d");

  Builder b(t);
  for (const auto& sf : req.theory) b.emit(b.holds(*sf.formula), sf.source);
  if (!req.negated_goal.empty()) {
    std::vector<PF> alts;
    for (std::size_t i = 0; i < req.negated_goal.size(); ++i)
      alts.push_back(b.fails(*req.negated_goal[i], goal_consts[i]));
    b.emit(mk_or(std::move(alts)), "goal");
  }
  return t;
}

GroundTheory ground(const Dpi& dpi, int witness_budget) {
  GroundRequest req;
  req.witness_budget = witness_budget;
  for (const auto& a : dpi.kb) req.theory.push_back({&a.formula, "ax" + std::to_string(a.id)});
  for (const auto& a : dpi.background) req.theory.push_back({&a.formula, "ax" + std::to_string(a.id)});
  for (std::size_t i = 0; i < dpi.positive_tests.size(); ++i)
    for (const auto& f : dpi.positive_tests[i].formulas)
      req.theory.push_back({&f, "P" + std::to_string(i)});
  return ground(req);
}

}  // namespace kbdebug
