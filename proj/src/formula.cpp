#include "kbdebug/formula.hpp"

#include <algorithm>
#include <cctype>

namespace kbdebug {

namespace {

struct Token {
  enum Type { Ident, LParen, RParen, Comma, Bar, Minus, End } type;
  std::string text;
  int column;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

std::vector<Token> tokenize(std::string_view s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
      case '(': out.push_back({Token::LParen, "(", col}); ++i; continue;
      case ')': out.push_back({Token::RParen, ")", col}); ++i; continue;
      case ',': out.push_back({Token::Comma, ",", col}); ++i; continue;
      case '|': out.push_back({Token::Bar, "|", col}); ++i; continue;
      case '-':
      case '~':
      case '!': out.push_back({Token::Minus, std::string(1, c), col}); ++i; continue;
      default: break;
    }
    if (!ident_char(c))
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    std::size_t j = i;
    while (j < s.size() && ident_char(s[j])) ++j;
    out.push_back({Token::Ident, std::string(s.substr(i, j - i)), col});
    i = j;
  }
  out.push_back({Token::End, "", static_cast<int>(s.size()) + 1});
  return out;
}

bool is_keyword(const std::string& w) {
  static const char* kws[] = {"sub", "equiv", "disjoint", "clause", "and", "or",
                              "not", "some", "all", "top", "bottom"};
  return std::find(std::begin(kws), std::end(kws), w) != std::end(kws);
}

class Parser {
 public:
  Parser(std::string_view text, int line) : toks_(tokenize(text, line)), line_(line) {}

  Formula statement() {
    Formula f;
    if (peek_word("disjoint")) {
      next();
      f.kind = FormulaKind::Disjointness;
      f.lhs = parse_concept();
      f.rhs = parse_concept();
    } else if (peek_word("clause")) {
      next();
      f.kind = FormulaKind::Clause;
      f.literals.push_back(literal());
      while (peek().type == Token::Bar) {
        next();
        f.literals.push_back(literal());
      }
    } else {
      Concept c = parse_concept();
      if (peek_word("sub") || peek_word("equiv")) {
        f.kind = next().text == "sub" ? FormulaKind::Subsumption : FormulaKind::Equivalence;
        f.lhs = std::move(c);
        f.rhs = parse_concept();
      } else if (peek().type == Token::LParen) {
        next();
        f.individuals.push_back(individual());
        if (peek().type == Token::Comma) {
          next();
          f.individuals.push_back(individual());
        }
        expect(Token::RParen, "')'");
        if (f.individuals.size() == 2) {
          if (c.kind != ConceptKind::Atom)
            fail("role assertion needs an atomic role name", toks_[0].column);
          f.kind = FormulaKind::RoleAssertion;
          f.role = c.name;
        } else {
          f.kind = FormulaKind::ConceptAssertion;
          f.lhs = std::move(c);
        }
      } else {
        fail("expected 'sub', 'equiv' or an assertion argument list", peek().column);
      }
    }
    if (peek().type != Token::End) fail("trailing input '" + peek().text + "'", peek().column);
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool peek_word(const char* w) const { return peek().type == Token::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg, int col) const { throw ParseError(msg, line_, col); }

  void expect(Token::Type t, const char* what) {
    if (peek().type != t) fail(std::string("expected ") + what, peek().column);
    next();
  }

  std::string name(const char* what) {
    const Token& t = peek();
    if (t.type != Token::Ident || is_keyword(t.text))
      fail(std::string("expected ") + what, t.column);
    return next().text;
  }

  std::string individual() { return name("individual name"); }

  Concept parse_concept() {
    const Token& t = peek();
    if (t.type == Token::Ident) {
      if (t.text == "top") { next(); return {ConceptKind::Top, "", {}}; }
      if (t.text == "bottom") { next(); return {ConceptKind::Bottom, "", {}}; }
      return Concept::atom(name("concept name"));
    }
    if (t.type != Token::LParen) fail("expected concept", t.column);
    next();
    const Token& op = peek();
    if (op.type != Token::Ident) fail("expected operator", op.column);
    Concept c;
    std::string w = next().text;
    if (w == "not") {
      c.kind = ConceptKind::Not;
      c.args.push_back(parse_concept());
    } else if (w == "and" || w == "or") {
      c.kind = w == "and" ? ConceptKind::And : ConceptKind::Or;
      while (peek().type != Token::RParen) {
        if (peek().type == Token::End) fail("unbalanced '('", peek().column);
        c.args.push_back(parse_concept());
      }
      if (c.args.size() < 2) fail("'" + w + "' needs at least two operands", op.column);
    } else if (w == "some" || w == "all") {
      c.kind = w == "some" ? ConceptKind::Some : ConceptKind::All;
      c.name = name("role name");
      c.args.push_back(parse_concept());
    } else {
      fail("unknown operator '" + w + "'", op.column);
    }
    expect(Token::RParen, "')'");
    return c;
  }

  Literal literal() {
    Literal l;
    if (peek().type == Token::Minus) {
      next();
      l.positive = false;
    } else if (peek_word("not")) {
      next();
      l.positive = false;
    }
    l.pred = name("predicate name");
    if (peek().type == Token::LParen) {
      next();
      l.args.push_back(individual());
      while (peek().type == Token::Comma) {
        next();
        l.args.push_back(individual());
      }
      expect(Token::RParen, "')'");
    }
    return l;
  }
};

void count_concept(const Concept& c, SyntaxCounts& out) {
  switch (c.kind) {
    case ConceptKind::Not: out["not"] += 1; break;
    case ConceptKind::And: out["and"] += static_cast<int>(c.args.size()) - 1; break;
    case ConceptKind::Or: out["or"] += static_cast<int>(c.args.size()) - 1; break;
    case ConceptKind::Some: out["some"] += 1; break;
    case ConceptKind::All: out["all"] += 1; break;
    default: break;
  }
  for (const auto& a : c.args) count_concept(a, out);
}

int depth_of(const Concept& c) {
  int d = 0;
  for (const auto& a : c.args) d = std::max(d, depth_of(a));
  if (c.kind == ConceptKind::Some || c.kind == ConceptKind::All) ++d;
  return d;
}

int quantifiers_in(const Concept& c) {
  int n = (c.kind == ConceptKind::Some || c.kind == ConceptKind::All) ? 1 : 0;
  for (const auto& a : c.args) n += quantifiers_in(a);
  return n;
}

void note(Signature& sig, const std::string& p, int arity) {
  auto [it, fresh] = sig.emplace(p, arity);
  if (!fresh && it->second != arity)
    throw std::invalid_argument("predicate '" + p + "' used with arity " + std::to_string(arity) +
                                " and " + std::to_string(it->second));
}

void sig_concept(const Concept& c, Signature& sig) {
  if (c.kind == ConceptKind::Atom && !c.name.empty()) note(sig, c.name, 1);
  if (c.kind == ConceptKind::Some || c.kind == ConceptKind::All) note(sig, c.name, 2);
  for (const auto& a : c.args) sig_concept(a, sig);
}

void unary_concept(const Concept& c, std::vector<std::string>& out) {
  if (c.kind == ConceptKind::Atom && !c.name.empty()) out.push_back(c.name);
  for (const auto& a : c.args) unary_concept(a, out);
}

}  // namespace

Formula parse_formula(std::string_view text, int line) { return Parser(text, line).statement(); }

std::string to_string(const Concept& c) {
  switch (c.kind) {
    case ConceptKind::Atom: return c.name;
    case ConceptKind::Top: return "top";
    case ConceptKind::Bottom: return "bottom";
    case ConceptKind::Not: return "(not " + to_string(c.args[0]) + ")";
    case ConceptKind::Some:
    case ConceptKind::All:
      return std::string("(") + (c.kind == ConceptKind::Some ? "some " : "all ") + c.name + " " +
             to_string(c.args[0]) + ")";
    case ConceptKind::And:
    case ConceptKind::Or: {
      std::string s = c.kind == ConceptKind::And ? "(and" : "(or";
      for (const auto& a : c.args) s += " " + to_string(a);
      return s + ")";
    }
  }
  return {};
}

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Subsumption: return to_string(f.lhs) + " sub " + to_string(f.rhs);
    case FormulaKind::Equivalence: return to_string(f.lhs) + " equiv " + to_string(f.rhs);
    case FormulaKind::Disjointness: return "disjoint " + to_string(f.lhs) + " " + to_string(f.rhs);
    case FormulaKind::ConceptAssertion: return to_string(f.lhs) + "(" + f.individuals[0] + ")";
    case FormulaKind::RoleAssertion:
      return f.role + "(" + f.individuals[0] + "," + f.individuals[1] + ")";
    case FormulaKind::Clause: {
      std::string s = "clause";
      for (std::size_t i = 0; i < f.literals.size(); ++i) {
        const Literal& l = f.literals[i];
        s += i ? " | " : " ";
        if (!l.positive) s += "-";
        s += l.pred;
        if (!l.args.empty()) {
          s += "(";
          for (std::size_t k = 0; k < l.args.size(); ++k) s += (k ? "," : "") + l.args[k];
          s += ")";
        }
      }
      return s;
    }
  }
  return {};
}

std::string kind_name(FormulaKind k) {
  switch (k) {
    case FormulaKind::Subsumption: return "subsumption";
    case FormulaKind::Equivalence: return "equivalence";
    case FormulaKind::Disjointness: return "disjointness";
    case FormulaKind::ConceptAssertion: return "concept-assertion";
    case FormulaKind::RoleAssertion: return "role-assertion";
    case FormulaKind::Clause: return "propositional-clause";
  }
  return {};
}

SyntaxCounts syntax_counts(const Formula& f) {
  SyntaxCounts out;
  if (f.kind == FormulaKind::Subsumption) out["sub"] = 1;
  if (f.kind == FormulaKind::Equivalence) out["equiv"] = 1;
  count_concept(f.lhs, out);
  count_concept(f.rhs, out);
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

int quantifier_depth(const Formula& f) { return std::max(depth_of(f.lhs), depth_of(f.rhs)); }

int quantifier_occurrences(const Formula& f) { return quantifiers_in(f.lhs) + quantifiers_in(f.rhs); }

void collect_signature(const Formula& f, Signature& sig) {
  switch (f.kind) {
    case FormulaKind::Subsumption:
    case FormulaKind::Equivalence:
    case FormulaKind::Disjointness:
      sig_concept(f.lhs, sig);
      sig_concept(f.rhs, sig);
      break;
    case FormulaKind::ConceptAssertion: sig_concept(f.lhs, sig); break;
    case FormulaKind::RoleAssertion: note(sig, f.role, 2); break;
    case FormulaKind::Clause:
      for (const auto& l : f.literals) note(sig, l.pred, static_cast<int>(l.args.size()));
      break;
  }
}

void collect_individuals(const Formula& f, std::vector<std::string>& out) {
  for (const auto& a : f.individuals) out.push_back(a);
  for (const auto& l : f.literals)
    for (const auto& a : l.args) out.push_back(a);
}

void collect_unary_predicates(const Formula& f, std::vector<std::string>& out) {
  unary_concept(f.lhs, out);
  unary_concept(f.rhs, out);
  for (const auto& l : f.literals)
    if (l.args.size() == 1) out.push_back(l.pred);
}

}  // namespace kbdebug
