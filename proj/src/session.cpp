#include "kbdebug/session.hpp"

#include <algorithm>
#include <stdexcept>

namespace kbdebug {

std::string engine_name(Engine e) { return e == Engine::Conflict ? "conflict" : "direct"; }
std::string mode_name(Mode m) { return m == Mode::Static ? "static" : "dynamic"; }

std::string status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::AwaitingAnswer: return "awaiting-answer";
    case SessionStatus::Converged: return "converged";
    case SessionStatus::Exhausted: return "exhausted";
    case SessionStatus::Aborted: return "aborted";
    case SessionStatus::Contradiction: return "contradiction";
  }
  return "?";
}

std::string answer_name(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Skip: return "skip";
  }
  return "?";
}

Engine parse_engine(const std::string& s) {
  if (s == "conflict" || s == "hs-tree" || s == "hstree") return Engine::Conflict;
  if (s == "direct" || s == "inv-hs-tree") return Engine::Direct;
  throw std::invalid_argument("unknown engine '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "static") return Mode::Static;
  if (s == "dynamic") return Mode::Dynamic;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

SessionStatus parse_status(const std::string& s) {
  for (auto st : {SessionStatus::AwaitingAnswer, SessionStatus::Converged, SessionStatus::Exhausted,
                  SessionStatus::Aborted, SessionStatus::Contradiction})
    if (status_name(st) == s) return st;
  throw std::invalid_argument("unknown status '" + s + "'");
}

Answer parse_answer(const std::string& s) {
  if (s == "yes" || s == "y") return Answer::Yes;
  if (s == "no" || s == "n") return Answer::No;
  if (s == "skip" || s == "s") return Answer::Skip;
  throw std::invalid_argument("answer must be yes, no or skip");
}

std::size_t SessionState::queries_answered() const {
  std::size_t n = 0;
  for (const auto& h : history)
    if (h.kind == HistoryEntry::Kind::Answer && h.answer != Answer::Skip) ++n;
  return n;
}

namespace {

void apply(Dpi& d, const HistoryEntry& e) {
  if (e.answer == Answer::Skip) return;
  TestCase t{e.formulas, e.answer == Answer::Yes ? Polarity::Positive : Polarity::Negative,
             e.kind == HistoryEntry::Kind::Answer ? Origin::AnsweredQuery : Origin::UserSpecified};
  (t.polarity == Polarity::Positive ? d.positive_tests : d.negative_tests).push_back(std::move(t));
}

IdSet kept_of(const Dpi& d, const IdSet& diag) {
  IdSet kept;
  for (const auto& a : d.kb)
    if (!diag.count(a.id)) kept.insert(a.id);
  return kept;
}

// p(answer | D) for a diagnosis judged against the instance the question was asked on.
double factor_for(const Dpi& at, const HistoryEntry& e, const IdSet& diag, const ReasonerOptions& opt) {
  for (std::size_t i = 0; i < e.leading.size(); ++i)
    if (e.leading[i] == diag) return answer_factor(e.partition, static_cast<int>(i), e.answer);
  FormulaList k = theory_of(at, kept_of(at, diag));
  QPartition one;
  if (entails(k, refs(e.formulas), opt)) {
    one.d_plus = {0};
  } else {
    for (const auto& f : e.formulas) k.push_back(&f);
    if (!validity(k, at.requirements, at.negative_tests, opt, true).valid()) one.d_minus = {0};
    else one.d_zero = {0};
  }
  return answer_factor(one, 0, e.answer);
}

std::vector<IdSet> ids_of(const std::vector<Diagnosis>& ds) {
  std::vector<IdSet> out;
  for (const auto& d : ds) out.push_back(d.axiom_ids);
  return out;
}

std::vector<IdSet> compute_leading(const SessionState& s, const AxiomProbs& probs) {
  const auto& cfg = s.config;
  ReasonerOptions opt{cfg.witness_budget};
  DiagnosisProblem cur(s.dpi, opt);
  if (!cur.admissible()) return {};
  std::size_t n = cfg.n_leading;
  if (cfg.mode == Mode::Static) {
    // frozen universe: minimal diagnoses of the initial instance, best-first
    DiagnosisProblem orig(s.initial, opt);
    for (std::size_t k = n;; k *= 2) {
      HsTreeResult r = hs_tree(orig, probs, k);
      std::vector<IdSet> out;
      for (const auto& d : r.diagnoses)
        if (out.size() < n && cur.is_diagnosis(d.axiom_ids)) out.push_back(d.axiom_ids);
      if (out.size() >= n || r.diagnoses.size() < k) return out;
    }
  }
  if (cfg.engine == Engine::Conflict) return ids_of(hs_tree(cur, probs, n).diagnoses);
  std::vector<IdSet> seeds;
  for (const auto& d : s.leading)
    if (cur.is_minimal_diagnosis(d.axiom_ids)) seeds.push_back(d.axiom_ids);
  return inv_hs_tree(cur, n, seeds, probs);
}

void settle(SessionState& s);

void refresh(SessionState& s) {
  ReasonerOptions opt{s.config.witness_budget};
  AxiomProbs probs = axiom_fault_probs(s.initial, s.config.fault_model);
  std::vector<IdSet> ids = compute_leading(s, probs);
  s.pending.reset();
  if (ids.empty()) {
    s.leading.clear();
    s.belief.clear();
    s.status = SessionStatus::Contradiction;
    s.message = "no diagnosis is consistent with the answers given";
    return;
  }
  std::vector<double> w;
  for (const auto& d : ids) w.push_back(diagnosis_prior(d, s.initial.kb, probs));
  Dpi at = s.initial;
  for (const auto& e : s.history) {
    if (e.kind == HistoryEntry::Kind::Answer && e.answer != Answer::Skip)
      for (std::size_t i = 0; i < ids.size(); ++i) w[i] *= factor_for(at, e, ids[i], opt);
    apply(at, e);
  }
  double total = 0;
  for (double x : w) total += x;
  std::vector<Diagnosis> lead;
  for (std::size_t i = 0; i < ids.size(); ++i)
    lead.push_back({ids[i], diagnosis_prior(ids[i], s.initial.kb, probs), 0.0});
  if (total > 0) {
    for (std::size_t i = 0; i < ids.size(); ++i) lead[i].posterior = w[i] / total;
  } else {
    // every prior underflowed; fall back to uniform
    for (auto& d : lead) d.posterior = 1.0 / lead.size();
  }
  std::stable_sort(lead.begin(), lead.end(), [](const Diagnosis& a, const Diagnosis& b) {
    return better(a.posterior, a.axiom_ids, b.posterior, b.axiom_ids);
  });
  s.leading = std::move(lead);
  s.belief.clear();
  for (const auto& d : s.leading) s.belief.push_back(d.posterior);
  s.status = SessionStatus::AwaitingAnswer;
  s.message.clear();
  settle(s);
}

// Applies the stop rule and, if the session goes on, picks the next query.
void settle(SessionState& s) {
  if (stop_check(s, s.config.sigma).converged) {
    s.status = SessionStatus::Converged;
    return;
  }
  if (s.queries_answered() >= s.config.max_queries) {
    s.status = SessionStatus::Aborted;
    s.message = "query limit reached";
    return;
  }
  next_query(s);
}

void fold(SessionState& s, HistoryEntry e) {
  if (s.config.strategy.kind == StrategyKind::Rio && e.kind == HistoryEntry::Kind::Answer)
    s.rio = rio_update(s.rio, e.partition, e.answer, e.leading.size());
  apply(s.dpi, e);
  s.history.push_back(std::move(e));
  s.skipped.clear();
  refresh(s);
}

}  // namespace

Dpi replay(const Dpi& initial, const std::vector<HistoryEntry>& history) {
  Dpi d = initial;
  for (const auto& e : history) apply(d, e);
  return d;
}

SessionState start_session(const Dpi& dpi, const SessionConfig& config) {
  if (config.n_leading == 0) throw std::invalid_argument("n_leading must be positive");
  if (!(config.sigma >= 0.0 && config.sigma <= 1.0)) throw std::invalid_argument("sigma must lie in [0,1]");
  validate(dpi);
  SessionState s;
  s.config = config;
  s.initial = dpi;
  s.dpi = dpi;
  s.rio = config.strategy.rio;
  DiagnosisProblem p(dpi, {config.witness_budget});
  if (!p.admissible()) throw NoDiagnosisExists();
  refresh(s);
  return s;
}

std::optional<PoolEntry> next_query(SessionState& s) {
  if (s.status != SessionStatus::AwaitingAnswer) return std::nullopt;
  if (s.pending) return s.pending;
  std::vector<IdSet> lead = ids_of(s.leading);
  QueryEngine engine(s.dpi, {s.config.witness_budget});
  StrategyChoice choice = s.config.strategy;
  choice.rio = s.rio;
  if (s.config.gamma && choice.kind == StrategyKind::Entropy && s.skipped.empty()) {
    if (auto hit = engine.ckk_search(lead, s.belief, *s.config.gamma)) {
      s.pending = hit;
      return s.pending;
    }
  }
  std::vector<PoolEntry> pool = engine.generate_pool(lead);
  std::erase_if(pool, [&](const PoolEntry& e) {
    return std::find(s.skipped.begin(), s.skipped.end(), texts(e.query.formulas)) != s.skipped.end();
  });
  if (pool.empty()) {
    s.status = SessionStatus::Exhausted;
    return std::nullopt;
  }
  std::size_t pick = select_query(pool, s.belief, choice, s.draws++);
  s.pending = pool[pick];
  return s.pending;
}

void submit_answer(SessionState& s, Answer a) {
  if (s.status != SessionStatus::AwaitingAnswer || !s.pending) throw std::logic_error("no pending query");
  PoolEntry q = *s.pending;
  HistoryEntry e{HistoryEntry::Kind::Answer, q.query.formulas, q.partition, a, ids_of(s.leading)};
  if (a == Answer::Skip) {
    s.history.push_back(std::move(e));
    s.skipped.push_back(texts(q.query.formulas));
    s.pending.reset();
    next_query(s);
    return;
  }
  fold(s, std::move(e));
}

void answer_query(SessionState& s, const std::vector<Formula>& q, Answer a) {
  if (s.status != SessionStatus::AwaitingAnswer) throw std::logic_error("session is not awaiting answers");
  if (a == Answer::Skip) throw std::invalid_argument("skip needs a pending query");
  std::vector<IdSet> lead = ids_of(s.leading);
  QPartition part = QueryEngine(s.dpi, {s.config.witness_budget}).classify(q, lead);
  fold(s, {HistoryEntry::Kind::Answer, q, part, a, lead});
}

void add_test_case(SessionState& s, const std::vector<Formula>& formulas, Polarity pol) {
  if (formulas.empty()) throw std::invalid_argument("test case must be non-empty");
  HistoryEntry e;
  e.kind = HistoryEntry::Kind::Test;
  e.formulas = formulas;
  e.answer = pol == Polarity::Positive ? Answer::Yes : Answer::No;
  apply(s.dpi, e);
  s.history.push_back(std::move(e));
  s.skipped.clear();
  refresh(s);
}

StopDecision stop_check(const SessionState& s, double sigma) {
  StopDecision d;
  if (s.leading.empty()) return d;
  d.best = s.leading.front();
  if (s.leading.size() == 1 || s.status == SessionStatus::Exhausted) {
    d.converged = true;
    return d;
  }
  d.converged = s.belief[0] - s.belief[1] > sigma;
  return d;
}

RepairProposal repair_proposal(const SessionState& s) {
  if (s.leading.empty()) throw std::logic_error("no diagnosis to propose");
  RepairProposal r;
  r.diagnosis = s.leading.front();
  int next = 0;
  for (const auto& a : s.dpi.kb) {
    next = std::max(next, a.id);
    if (!r.diagnosis.axiom_ids.count(a.id)) r.solution_kb.push_back(a);
  }
  for (const auto& a : s.dpi.background) next = std::max(next, a.id);
  for (const auto& t : s.dpi.positive_tests)
    for (const auto& f : t.formulas) r.solution_kb.push_back(make_axiom(++next, to_string(f)));
  return r;
}

ValidityReport check_repair(const SessionState& s, const RepairProposal& r) {
  Dpi d;
  d.background = s.dpi.background;
  d.background.insert(d.background.end(), r.solution_kb.begin(), r.solution_kb.end());
  d.negative_tests = s.dpi.negative_tests;
  d.requirements = s.dpi.requirements;
  return check_validity(d, {}, {s.config.witness_budget});
}

BatchResult run_batch(const Dpi& dpi, const SessionConfig& config, const IdSet& target) {
  ReasonerOptions opt{config.witness_budget};
  DiagnosisProblem p(dpi, opt);
  for (int id : target)
    if (!dpi.has_kb_id(id)) throw std::invalid_argument("target names unknown axiom " + std::to_string(id));
  if (!p.is_diagnosis(target)) throw std::invalid_argument("oracle target is not a diagnosis");
  FormulaList oracle = theory_of(dpi, kept_of(dpi, target));
  SessionState s = start_session(dpi, config);
  while (s.status == SessionStatus::AwaitingAnswer) {
    auto q = next_query(s);
    if (!q) break;
    submit_answer(s, entails(oracle, refs(q->query.formulas), opt) ? Answer::Yes : Answer::No);
  }
  BatchResult out;
  out.status = s.status;
  out.query_count = s.queries_answered();
  out.history = s.history;
  for (const auto& d : s.leading) out.remaining.push_back(d.axiom_ids);
  if (!s.leading.empty()) out.proposal = repair_proposal(s);
  return out;
}

HsTreeResult non_interactive_debug(const Dpi& dpi, const FaultModel& m, const DebugLimits& limits,
                                   int witness_budget) {
  DiagnosisProblem p(dpi, {witness_budget});
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (limits.time) deadline = std::chrono::steady_clock::now() + *limits.time;
  HsTreeResult r = hs_tree(p, axiom_fault_probs(dpi, m), limits.n, deadline);
  double total = 0;
  for (const auto& d : r.diagnoses) total += d.prior;
  for (auto& d : r.diagnoses) d.posterior = total > 0 ? d.prior / total : 0.0;
  return r;
}

}  // namespace kbdebug
