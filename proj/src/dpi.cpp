#include "kbdebug/dpi.hpp"

#include <sstream>

namespace kbdebug {

using nlohmann::json;

std::vector<int> Dpi::kb_ids() const {
  std::vector<int> ids;
  ids.reserve(kb.size());
  for (const auto& a : kb) ids.push_back(a.id);
  return ids;
}

const Axiom& Dpi::axiom(int id) const {
  for (const auto& a : kb)
    if (a.id == id) return a;
  for (const auto& a : background)
    if (a.id == id) return a;
  throw std::out_of_range("unknown axiom id " + std::to_string(id));
}

bool Dpi::has_kb_id(int id) const {
  for (const auto& a : kb)
    if (a.id == id) return true;
  return false;
}

Axiom make_axiom(int id, const std::string& text, int line) {
  Axiom a;
  a.id = id;
  a.text = text;
  a.formula = parse_formula(text, line);
  a.counts = syntax_counts(a.formula);
  return a;
}

namespace {

std::string strip(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> statements_of(const json& j, const char* field) {
  std::vector<std::string> out;
  if (!j.contains(field) || j[field].is_null()) return out;
  const json& v = j[field];
  if (v.is_string()) {
    std::istringstream in(v.get<std::string>());
    std::string line;
    while (std::getline(in, line))
      if (auto s = strip(line); !s.empty()) out.push_back(s);
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<std::string>());
  } else {
    throw DpiError(std::string("field '") + field + "' must be a string or an array");
  }
  return out;
}

std::vector<TestCase> tests_of(const json& j, const char* field, Polarity pol) {
  std::vector<TestCase> out;
  if (!j.contains(field)) return out;
  for (const auto& t : j[field]) {
    if (t.is_array()) {
      out.push_back(make_test(t.get<std::vector<std::string>>(), pol));
    } else if (t.is_object()) {
      Origin o = t.value("origin", std::string("user-specified")) == "answered-query"
                     ? Origin::AnsweredQuery
                     : Origin::UserSpecified;
      out.push_back(make_test(t.at("formulas").get<std::vector<std::string>>(), pol, o));
    } else {
      throw DpiError(std::string("entries of '") + field + "' must be statement lists");
    }
  }
  return out;
}

json tests_json(const std::vector<TestCase>& ts) {
  json arr = json::array();
  for (const auto& t : ts) {
    if (t.origin == Origin::AnsweredQuery)
      arr.push_back({{"formulas", texts(t.formulas)}, {"origin", "answered-query"}});
    else
      arr.push_back(texts(t.formulas));
  }
  return arr;
}

}  // namespace

std::vector<Axiom> parse_kb(const std::string& source, int first_id) {
  std::vector<Axiom> out;
  std::istringstream in(source);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line.substr(0, line.find('#'));
    if (strip(s).empty()) continue;
    // parse the raw line so error columns match the source
    Axiom a = make_axiom(first_id++, s, lineno);
    a.text = strip(s);
    out.push_back(std::move(a));
  }
  Signature sig;
  try {
    for (const auto& a : out) collect_signature(a.formula, sig);
  } catch (const std::invalid_argument& e) {
    throw DpiError(e.what());
  }
  return out;
}

TestCase make_test(const std::vector<std::string>& statements, Polarity pol, Origin origin) {
  if (statements.empty()) throw DpiError("test case must contain at least one formula");
  TestCase t;
  t.polarity = pol;
  t.origin = origin;
  for (const auto& s : statements) t.formulas.push_back(parse_formula(s));
  return t;
}

std::vector<std::string> texts(const std::vector<Formula>& fs) {
  std::vector<std::string> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(to_string(f));
  return out;
}

void validate(const Dpi& dpi) {
  std::set<int> ids;
  Signature sig;
  auto visit = [&](const Axiom& a) {
    if (!ids.insert(a.id).second) throw DpiError("duplicate axiom id " + std::to_string(a.id));
    collect_signature(a.formula, sig);
  };
  for (const auto& a : dpi.kb) visit(a);
  for (const auto& a : dpi.background) visit(a);
  for (const auto* ts : {&dpi.positive_tests, &dpi.negative_tests})
    for (const auto& t : *ts)
      for (const auto& f : t.formulas) collect_signature(f, sig);
  if (!dpi.requirements.consistency) throw DpiError("requirements must include consistency");
}

Dpi dpi_from_json(const json& j) {
  Dpi d;
  int id = 1;
  auto add = [&](std::vector<Axiom>& into, const char* field) {
    int n = 0;
    for (const auto& s : statements_of(j, field)) {
      // ParseError goes out as is, callers want the line and column
      into.push_back(make_axiom(id++, s, ++n));
    }
  };
  add(d.kb, "kb");
  add(d.background, "background");
  try {
    d.positive_tests = tests_of(j, "positive_tests", Polarity::Positive);
    d.negative_tests = tests_of(j, "negative_tests", Polarity::Negative);
  } catch (const ParseError& e) {
    throw DpiError(std::string("test case: ") + e.what());
  }
  if (j.contains("requirements")) {
    d.requirements.consistency = false;
    for (const auto& r : j["requirements"]) {
      auto s = r.get<std::string>();
      if (s == "consistency") d.requirements.consistency = true;
      else if (s == "coherence") d.requirements.coherence = true;
      else throw DpiError("unknown requirement '" + s + "'");
    }
    // coherence presupposes consistency
    if (d.requirements.coherence) d.requirements.consistency = true;
  }
  if (j.contains("entailment_types")) {
    d.entailment_types = {false, false};
    for (const auto& r : j["entailment_types"]) {
      auto s = r.get<std::string>();
      if (s == "assertions") d.entailment_types.assertions = true;
      else if (s == "subsumptions") d.entailment_types.subsumptions = true;
      else throw DpiError("unknown entailment type '" + s + "'");
    }
  }
  try {
    validate(d);
  } catch (const std::invalid_argument& e) {
    throw DpiError(e.what());
  }
  return d;
}

json dpi_to_json(const Dpi& d) {
  json j;
  j["kb"] = json::array();
  for (const auto& a : d.kb) j["kb"].push_back(a.text);
  j["background"] = json::array();
  for (const auto& a : d.background) j["background"].push_back(a.text);
  j["positive_tests"] = tests_json(d.positive_tests);
  j["negative_tests"] = tests_json(d.negative_tests);
  j["requirements"] = json::array({"consistency"});
  if (d.requirements.coherence) j["requirements"].push_back("coherence");
  j["entailment_types"] = json::array();
  if (d.entailment_types.assertions) j["entailment_types"].push_back("assertions");
  if (d.entailment_types.subsumptions) j["entailment_types"].push_back("subsumptions");
  return j;
}

}  // namespace kbdebug
