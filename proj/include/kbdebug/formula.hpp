#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kbdebug {

enum class ConceptKind { Atom, Top, Bottom, Not, And, Or, Some, All };

// Concept expression. For Some/All, `name` holds the role and args[0] the filler.
struct Concept {
  ConceptKind kind = ConceptKind::Atom;
  std::string name;
  std::vector<Concept> args;

  bool operator==(const Concept&) const = default;

  static Concept atom(std::string n) { return {ConceptKind::Atom, std::move(n), {}}; }
};

struct Literal {
  bool positive = true;
  std::string pred;
  std::vector<std::string> args;
  bool operator==(const Literal&) const = default;
};

enum class FormulaKind {
  Subsumption,
  Equivalence,
  Disjointness,
  ConceptAssertion,
  RoleAssertion,
  Clause
};

struct Formula {
  FormulaKind kind = FormulaKind::Clause;
  Concept lhs;
  Concept rhs;
  std::string role;
  std::vector<std::string> individuals;
  std::vector<Literal> literals;

  bool operator==(const Formula&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Parses one statement. `line` is only used for error positions.
Formula parse_formula(std::string_view text, int line = 1);

std::string to_string(const Concept& c);
std::string to_string(const Formula& f);
std::string kind_name(FormulaKind k);

// sub, equiv, not, and, or, some, all. n-ary and/or count as (arity - 1).
using SyntaxCounts = std::map<std::string, int>;
SyntaxCounts syntax_counts(const Formula& f);

// Depth of nested quantifiers (some/all inside some/all counts 2).
int quantifier_depth(const Formula& f);
int quantifier_occurrences(const Formula& f);

// Predicate name -> arity. Throws std::invalid_argument on a clash.
using Signature = std::map<std::string, int>;
void collect_signature(const Formula& f, Signature& sig);
void collect_individuals(const Formula& f, std::vector<std::string>& out);
// Unary predicate names (concept atoms and unary clause atoms).
void collect_unary_predicates(const Formula& f, std::vector<std::string>& out);

}  // namespace kbdebug
