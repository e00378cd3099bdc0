#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbdebug/formula.hpp"

namespace kbdebug {

using IdSet = std::set<int>;

struct Axiom {
  int id = 0;
  std::string text;
  Formula formula;
  SyntaxCounts counts;

  FormulaKind kind() const { return formula.kind; }
};

enum class Polarity { Positive, Negative };
enum class Origin { UserSpecified, AnsweredQuery };

struct TestCase {
  std::vector<Formula> formulas;
  Polarity polarity = Polarity::Positive;
  Origin origin = Origin::UserSpecified;
};

struct Requirements {
  bool consistency = true;
  bool coherence = false;
};

// Which atomic entailments the query generator may use.
struct EntailmentTypes {
  bool assertions = true;
  bool subsumptions = true;
};

struct Dpi {
  std::vector<Axiom> kb;
  std::vector<Axiom> background;
  std::vector<TestCase> positive_tests;
  std::vector<TestCase> negative_tests;
  Requirements requirements;
  EntailmentTypes entailment_types;

  std::vector<int> kb_ids() const;
  const Axiom& axiom(int id) const;  // throws std::out_of_range
  bool has_kb_id(int id) const;
};

class DpiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One axiom per non-empty, non-comment line; ids start at first_id.
std::vector<Axiom> parse_kb(const std::string& source, int first_id = 1);
Axiom make_axiom(int id, const std::string& text, int line = 1);

// Checks id uniqueness and predicate arity agreement over all parts.
void validate(const Dpi& dpi);

Dpi dpi_from_json(const nlohmann::json& j);
nlohmann::json dpi_to_json(const Dpi& dpi);

TestCase make_test(const std::vector<std::string>& statements, Polarity pol,
                   Origin origin = Origin::UserSpecified);

std::vector<std::string> texts(const std::vector<Formula>& fs);

}  // namespace kbdebug
