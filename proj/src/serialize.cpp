#include "kbdebug/serialize.hpp"

#include <stdexcept>

namespace kbdebug {

using nlohmann::json;

namespace {

std::vector<Formula> formulas_from(const json& j) {
  std::vector<Formula> out;
  for (const auto& s : j) out.push_back(parse_formula(s.get<std::string>()));
  return out;
}

json pool_entry_json(const PoolEntry& e) {
  return {{"formulas", texts(e.query.formulas)}, {"minimized", e.query.minimized},
          {"partition", partition_to_json(e.partition)}};
}

PoolEntry pool_entry_from(const json& j) {
  return {{formulas_from(j.at("formulas")), j.value("minimized", true)}, partition_from_json(j.at("partition"))};
}

json rio_json(const RioState& r) {
  return {{"c", r.c}, {"c_min", r.c_min}, {"c_max", r.c_max}, {"epsilon", r.epsilon}};
}

RioState rio_from(const json& j) {
  return {j.at("c").get<double>(), j.at("c_min").get<double>(), j.at("c_max").get<double>(),
          j.at("epsilon").get<double>()};
}

}  // namespace

json ids_to_json(const IdSet& ids) { return json(std::vector<int>(ids.begin(), ids.end())); }

IdSet ids_from_json(const json& j) {
  IdSet out;
  for (const auto& v : j) {
    if (v.is_number_integer()) out.insert(v.get<int>());
    else {
      // "ax3" is accepted too
      auto s = v.get<std::string>();
      out.insert(std::stoi(s.rfind("ax", 0) == 0 ? s.substr(2) : s));
    }
  }
  return out;
}

json partition_to_json(const QPartition& p) {
  return {{"d_plus", p.d_plus}, {"d_minus", p.d_minus}, {"d_zero", p.d_zero}};
}

QPartition partition_from_json(const json& j) {
  return {j.at("d_plus").get<std::vector<int>>(), j.at("d_minus").get<std::vector<int>>(),
          j.at("d_zero").get<std::vector<int>>()};
}

json diagnosis_to_json(const Diagnosis& d) {
  return {{"axioms", ids_to_json(d.axiom_ids)}, {"prior", d.prior}, {"posterior", d.posterior}};
}

json proposal_to_json(const RepairProposal& r) {
  json kb = json::array();
  for (const auto& a : r.solution_kb) kb.push_back(a.text);
  return {{"diagnosis", diagnosis_to_json(r.diagnosis)}, {"solution_kb", kb}};
}

SessionConfig config_from_json(const json& j) {
  SessionConfig c;
  if (j.is_null()) return c;
  c.n_leading = j.value("n_leading", c.n_leading);
  c.sigma = j.value("sigma", c.sigma);
  if (j.contains("engine")) c.engine = parse_engine(j["engine"].get<std::string>());
  if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
  if (j.contains("strategy")) c.strategy = strategy_from_json(j["strategy"]);
  if (j.contains("fault_model")) c.fault_model = fault_model_from_json(j["fault_model"]);
  if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma = j["gamma"].get<double>();
  c.witness_budget = j.value("witness_budget", c.witness_budget);
  c.max_queries = j.value("max_queries", c.max_queries);
  if (c.n_leading == 0) throw std::invalid_argument("n_leading must be positive");
  if (!(c.sigma >= 0.0 && c.sigma <= 1.0)) throw std::invalid_argument("sigma must lie in [0,1]");
  if (c.witness_budget < 1) throw std::invalid_argument("witness_budget must be at least 1");
  return c;
}

json config_to_json(const SessionConfig& c) {
  json j{{"n_leading", c.n_leading},
         {"sigma", c.sigma},
         {"engine", engine_name(c.engine)},
         {"mode", mode_name(c.mode)},
         {"strategy", strategy_to_json(c.strategy)},
         {"fault_model", fault_model_to_json(c.fault_model)},
         {"witness_budget", c.witness_budget},
         {"max_queries", c.max_queries}};
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  return j;
}

json session_to_json(const SessionState& s) {
  json hist = json::array();
  for (const auto& h : s.history) {
    json e{{"kind", h.kind == HistoryEntry::Kind::Answer ? "answer" : "test"},
           {"formulas", texts(h.formulas)},
           {"answer", answer_name(h.answer)}};
    if (h.kind == HistoryEntry::Kind::Answer) {
      e["partition"] = partition_to_json(h.partition);
      e["leading"] = json::array();
      for (const auto& d : h.leading) e["leading"].push_back(ids_to_json(d));
    }
    hist.push_back(e);
  }
  json lead = json::array();
  for (const auto& d : s.leading) lead.push_back(diagnosis_to_json(d));
  json j{{"config", config_to_json(s.config)},
         {"dpi", dpi_to_json(s.initial)},
         {"history", hist},
         {"leading", lead},
         {"belief", s.belief},
         {"rio", rio_json(s.rio)},
         {"status", status_name(s.status)},
         {"skipped", s.skipped},
         {"draws", s.draws},
         {"message", s.message}};
  j["pending"] = s.pending ? pool_entry_json(*s.pending) : json(nullptr);
  return j;
}

SessionState session_from_json(const json& j) {
  SessionState s;
  s.config = config_from_json(j.at("config"));
  s.initial = dpi_from_json(j.at("dpi"));
  for (const auto& e : j.at("history")) {
    HistoryEntry h;
    h.kind = e.at("kind").get<std::string>() == "answer" ? HistoryEntry::Kind::Answer : HistoryEntry::Kind::Test;
    h.formulas = formulas_from(e.at("formulas"));
    h.answer = parse_answer(e.at("answer").get<std::string>());
    if (h.kind == HistoryEntry::Kind::Answer) {
      h.partition = partition_from_json(e.at("partition"));
      for (const auto& d : e.at("leading")) h.leading.push_back(ids_from_json(d));
    }
    s.history.push_back(std::move(h));
  }
  s.dpi = replay(s.initial, s.history);
  for (const auto& d : j.at("leading"))
    s.leading.push_back({ids_from_json(d.at("axioms")), d.at("prior").get<double>(), d.at("posterior").get<double>()});
  s.belief = j.at("belief").get<Belief>();
  s.rio = rio_from(j.at("rio"));
  s.status = parse_status(j.at("status").get<std::string>());
  s.skipped = j.at("skipped").get<std::vector<std::vector<std::string>>>();
  s.draws = j.at("draws").get<std::uint64_t>();
  s.message = j.value("message", std::string());
  if (!j.at("pending").is_null()) s.pending = pool_entry_from(j["pending"]);
  return s;
}

json session_view(const SessionState& s) {
  json lead = json::array();
  for (const auto& d : s.leading) lead.push_back(diagnosis_to_json(d));
  json v{{"status", status_name(s.status)},
         {"leading", lead},
         {"belief", s.belief},
         {"queries_answered", s.queries_answered()}};
  v["query"] = s.pending ? json(texts(s.pending->query.formulas)) : json(nullptr);
  if (s.pending) v["partition"] = partition_to_json(s.pending->partition);
  if (s.status != SessionStatus::AwaitingAnswer && !s.leading.empty()) {
    RepairProposal r = repair_proposal(s);
    v["diagnosis"] = ids_to_json(r.diagnosis.axiom_ids);
    v["proposal"] = proposal_to_json(r);
  }
  if (!s.message.empty()) v["message"] = s.message;
  return v;
}

}  // namespace kbdebug
