// Acceptance run: one PASS/FAIL line per criterion. Checks marked `known` reproduce
// numbers the source text cannot reach with its own stated inputs; they are
// reported but do not change the exit code.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "kbdebug/serialize.hpp"
#include "kbdebug/session.hpp"

using namespace kbdebug;
using nlohmann::json;

namespace {

struct Check {
  std::string what;
  bool ok;
  bool known = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::vector<Check> checks;

  void add(std::string what, bool ok, std::string detail = {}) {
    checks.push_back({std::move(what), ok, false, std::move(detail)});
  }
  void known(std::string what, bool ok, std::string detail) {
    checks.push_back({std::move(what), ok, true, std::move(detail)});
  }
};

struct Fixture {
  Dpi dpi;
  FaultModel model;
};

Fixture load(const std::string& name) {
  std::ifstream in(std::string(KBDEBUG_FIXTURES) + "/" + name + ".json");
  json j = json::parse(in);
  return {dpi_from_json(j), j.contains("fault_model") ? fault_model_from_json(j["fault_model"]) : FaultModel{}};
}

bool near(double a, double b, double tol = 1e-3) { return std::abs(a - b) <= tol; }

std::string fmt(const std::vector<double>& v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4) << "(";
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << v[i];
  return o.str() + ")";
}

bool all_near(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!near(a[i], b[i])) return false;
  return true;
}

std::set<IdSet> as_set(const std::vector<IdSet>& v) { return {v.begin(), v.end()}; }
std::set<IdSet> as_set(const std::vector<Diagnosis>& v) {
  std::set<IdSet> s;
  for (const auto& d : v) s.insert(d.axiom_ids);
  return s;
}

std::vector<Formula> parse_all(const std::vector<std::string>& texts) {
  std::vector<Formula> out;
  for (const auto& t : texts) out.push_back(parse_formula(t));
  return out;
}

Belief priors(const Dpi& dpi, const FaultModel& m, const std::vector<IdSet>& diags) {
  AxiomProbs probs = axiom_fault_probs(dpi, m);
  Belief b;
  for (const auto& d : diags) b.push_back(diagnosis_prior(d, dpi.kb, probs));
  return normalize(b);
}

std::vector<int> idx(std::initializer_list<int> one_based) {
  std::vector<int> v;
  for (int i : one_based) v.push_back(i - 1);
  return v;
}

// ---------------------------------------------------------------------------

Criterion g1() {
  Criterion c{"G1"};
  auto [dpi, m] = load("example1");
  DiagnosisProblem p(dpi);
  auto cs = quick_xplain(p);
  c.add("minimal conflict", cs && cs->axiom_ids == IdSet{1, 2, 3, 4});
  auto diags = hs_tree(p, axiom_fault_probs(dpi, m), kUnbounded).diagnoses;
  c.add("four singleton diagnoses", as_set(diags) == std::set<IdSet>{{1}, {2}, {3}, {4}});

  QueryEngine e(dpi);
  std::vector<std::vector<std::string>> table = {{}, {"B(w)"}, {"B(w)", "C(w)"}, {"B(w)", "C(w)", "D(w)"}};
  bool ents = true;
  for (int i = 1; i <= 4; ++i) {
    std::vector<std::string> got;
    for (const auto& f : e.entailments({i})) {
      std::string t = to_string(f);
      if (t.ends_with("(w)")) got.push_back(t);
    }
    std::sort(got.begin(), got.end());
    if (got != table[i - 1]) ents = false;
  }
  c.add("entailment table (individual w)", ents);

  std::vector<IdSet> leading = {{1}, {2}, {3}, {4}};
  auto pool = e.generate_pool(leading);
  std::map<std::vector<std::string>, QPartition> got;
  for (const auto& pe : pool) got[texts(pe.query.formulas)] = pe.partition;
  std::map<std::vector<std::string>, QPartition> want = {
      {{"B(w)"}, {idx({2, 3, 4}), idx({1}), {}}},
      {{"C(w)"}, {idx({3, 4}), idx({1, 2}), {}}},
      {{"D(w)"}, {idx({4}), idx({1, 2, 3}), {}}},
  };
  c.add("minimized pool", got == want, std::to_string(pool.size()) + " entries");
  return c;
}

Criterion g2() {
  Criterion c{"G2"};
  auto [dpi, m] = load("example1");
  std::vector<IdSet> leading = {{1}, {2}, {3}, {4}};
  QPartition q1{idx({2, 3, 4}), idx({1}), {}}, q2{idx({3, 4}), idx({1, 2}), {}}, q3{idx({4}), idx({1, 2, 3}), {}};
  AxiomProbs probs = axiom_fault_probs(dpi, m);
  c.add("p(D1) = 0.0097", near(diagnosis_prior({1}, dpi.kb, probs), 0.0097, 1e-4));

  auto scores = [&](const Belief& b) {
    return std::vector<double>{score_entropy(q1, b), score_entropy(q2, b), score_entropy(q3, b)};
  };
  Belief uni = priors(dpi, m, leading);
  auto s0 = scores(uni);
  c.add("uniform scores", all_near(s0, {0.1887, 0.0, 0.1887}), fmt(s0));
  auto s1 = scores(bayes_update(uni, q2, Answer::No));
  c.add("scores after q2 = no", all_near(s1, {0.0, 1.0, 1.0}), fmt(s1));

  FaultModel skew;
  skew.axiom_overrides = {{1, 0.025}, {2, 0.01}, {3, 0.01}, {4, 0.01}};
  auto s2 = scores(priors(dpi, skew, leading));
  FaultModel alt = skew;
  alt.axiom_overrides[1] = 0.1;
  auto s3 = scores(priors(dpi, alt, leading));
  c.known("skewed scores (0.250, 0.408, 0.629)", all_near(s2, {0.250, 0.408, 0.629}),
          "p(ax1)=0.025 gives " + fmt(s2) + ", the table matches p(ax1)=0.1: " + fmt(s3));
  c.add("skewed model picks q1, one answer suffices",
        s2[0] < s2[1] && s2[0] < s2[2] &&
            bayes_update(priors(dpi, skew, leading), q1, Answer::No) == Belief{1, 0, 0, 0});
  return c;
}

Criterion g3() {
  Criterion c{"G3"};
  auto [dpi, m] = load("example2");
  DiagnosisProblem p(dpi);
  c.add("two minimal conflicts", as_set(brute_force_minimal_conflicts(p)) == std::set<IdSet>{{1, 3, 4}, {1, 2, 3, 5}});
  std::vector<IdSet> expected = {{1}, {3}, {4, 5}, {2, 4}};
  c.add("four minimal diagnoses", as_set(brute_force_minimal_diagnoses(p)) == as_set(expected));
  double p2 = axiom_fault_prob(dpi.axiom(2), m);
  c.add("p(ax2) = 0.108", near(p2, 0.108), std::to_string(p2));

  Belief b = priors(dpi, m, expected);
  c.add("priors", all_near(b, {0.0970, 0.5874, 0.0026, 0.3130}), fmt(b));
  QueryEngine e(dpi);
  auto part = [&](std::vector<std::string> q) { return e.classify(parse_all(q), expected); };
  QPartition q1 = part({"B sub M3"}), q3 = part({"M1 sub B"}), q4 = part({"M1(w)", "M2(u)"});
  Belief b3 = bayes_update(b, q3, Answer::Yes);
  c.add("posteriors after q3 = yes", all_near(b3, {0.2352, 0, 0.0063, 0.7585}), fmt(b3));
  Belief b4 = bayes_update(b3, q4, Answer::Yes);
  c.add("posteriors after q4 = yes", all_near(b4, {0, 0, 0.0082, 0.9918}), fmt(b4));
  std::vector<double> row = {score_entropy(q3, b), score_entropy(q4, b), score_entropy(q1, b)};
  c.add("initial scores q3, q4, q1", all_near(row, {0.022, 0.540, 0.974}), fmt(row));

  SessionConfig cfg;
  cfg.fault_model = m;
  cfg.mode = Mode::Static;
  auto r85 = run_batch(dpi, cfg, {2, 4});
  cfg.sigma = 0.95;
  auto r95 = run_batch(dpi, cfg, {2, 4});
  c.add("ENT to D4 in <= 3 queries",
        r85.query_count <= 3 && r85.proposal.diagnosis.axiom_ids == IdSet{2, 4},
        std::to_string(r85.query_count));
  c.add("ENT to D4 in 2 queries at sigma 0.95",
        r95.query_count == 2 && r95.proposal.diagnosis.axiom_ids == IdSet{2, 4},
        std::to_string(r95.query_count));
  return c;
}

Criterion g4() {
  Criterion c{"G4"};
  auto [dpi, m] = load("partdx");
  DiagnosisProblem p(dpi);
  AxiomProbs probs = axiom_fault_probs(dpi, m);
  auto d = inv_qx(p, {}, probs);
  c.add("Inv-QX returns [ax3, ax2]", d && *d == std::vector<int>{3, 2});
  std::set<IdSet> want = {{2, 3}, {3, 4}, {1, 4, 5}};
  c.add("Inv-HS-Tree enumerates all three", as_set(inv_hs_tree(p, kUnbounded, {}, probs)) == want);
  c.add("brute-force conflicts",
        as_set(brute_force_minimal_conflicts(p)) == std::set<IdSet>{{1, 3}, {2, 4}, {3, 5}, {3, 4}});

  SessionConfig cfg;
  cfg.fault_model = m;
  cfg.engine = Engine::Direct;
  cfg.n_leading = 2;
  cfg.sigma = 1.0;
  SessionState s = start_session(dpi, cfg);
  answer_query(s, parse_all({"c(w)"}), Answer::No);
  answer_query(s, parse_all({"a sub c"}), Answer::Yes);
  auto stop = stop_check(s, cfg.sigma);
  c.add("direct session converges to [ax3, ax4]",
        s.status == SessionStatus::Converged && stop.best && stop.best->axiom_ids == IdSet{3, 4},
        status_name(s.status));
  return c;
}

Criterion g5() {
  Criterion c{"G5"};
  auto [dpi, m] = load("rio");
  std::vector<IdSet> leading = {{1}, {2}, {3}, {4}, {5}, {6}};
  Belief b = priors(dpi, m, leading);
  c.known("normalized priors (0.003 x4, 0.393, 0.591)", all_near(b, {0.003, 0.003, 0.003, 0.003, 0.393, 0.591}),
          "the prior formula gives " + fmt(b) + "; the published figures normalize raw axiom probabilities");

  QueryEngine e(dpi);
  std::vector<std::pair<std::vector<std::string>, QPartition>> table = {
      {{"DeptEmployee(s)", "Student(s)"}, {idx({4, 6}), idx({1, 2, 3, 5}), {}}},
      {{"PhD(s)"}, {idx({1, 2, 3, 4, 6}), idx({5}), {}}},
      {{"Researcher(s)"}, {idx({2, 3, 4, 6}), idx({1, 5}), {}}},
      {{"Student(s)"}, {idx({1, 2, 4, 5, 6}), idx({3}), {}}},
      {{"Researcher(s)", "Student(s)"}, {idx({2, 4, 6}), idx({1, 3, 5}), {}}},
      {{"DeptMember(s)"}, {idx({3, 4}), idx({1, 2, 5, 6}), {}}},
      {{"PhD(s)", "Student(s)"}, {idx({1, 2, 4, 6}), idx({3, 5}), {}}},
      // printed with D2 in the positive set; only D4 keeps both entailments
      {{"DeptMember(s)", "Student(s)"}, {idx({4}), idx({1, 2, 3, 5, 6}), {}}},
      {{"DeptEmployee(s)"}, {idx({3, 4, 6}), idx({1, 2, 5}), {}}},
  };
  bool rows = true;
  std::set<QPartition> parts;
  for (const auto& [q, want] : table) {
    if (e.classify(parse_all(q), leading) != want) rows = false;
    parts.insert(want);
  }
  c.add("query table partitions", rows && parts.size() == 9);
  auto pool = e.generate_pool(leading);
  std::set<QPartition> pooled;
  for (const auto& pe : pool) pooled.insert(pe.partition);
  c.add("pool covers the table", std::includes(pooled.begin(), pooled.end(), parts.begin(), parts.end()),
        std::to_string(pool.size()) + " pool partitions");

  c.add("qc(X1), qc(X2), qc(X3)",
        near(query_cautiousness(table[0].second, 6), 2.0 / 6) && near(query_cautiousness(table[1].second, 6), 1.0 / 6) &&
            near(query_cautiousness(table[4].second, 6), 3.0 / 6));
  RioState r{0.4, 0.0, 0.5, 0.25};
  RioState r2 = rio_update(r, table[4].second, Answer::Yes, 6);
  c.add("c update 0.4 -> 0.233", near(r2.c, 0.233, 0.005), std::to_string(r2.c));

  SessionConfig cfg;
  cfg.fault_model = m;
  cfg.sigma = 1.0;
  auto run = [&](StrategyKind k, IdSet t) {
    SessionConfig x = cfg;
    x.strategy.kind = k;
    auto res = run_batch(dpi, x, t);
    return res.proposal.diagnosis.axiom_ids == t ? res.query_count : 0;
  };
  std::size_t ent2 = run(StrategyKind::Entropy, {2}), spl2 = run(StrategyKind::Split, {2}),
              ent6 = run(StrategyKind::Entropy, {6});
  c.add("batch (ENT,D2)=4 (SPL,D2)=3 (ENT,D6)=2", ent2 == 4 && spl2 == 3 && ent6 == 2,
        std::to_string(ent2) + "/" + std::to_string(spl2) + "/" + std::to_string(ent6));
  return c;
}

// Random Horn + disjointness instances over a handful of unary predicates.
std::optional<Dpi> random_dpi(std::mt19937& g) {
  std::uniform_int_distribution<int> pred(0, 5), coin(0, 2);
  auto P = [&] { return "P" + std::to_string(pred(g)); };
  std::size_t n = std::uniform_int_distribution<std::size_t>(3, 10)(g);
  std::ostringstream kb;
  for (std::size_t i = 0; i < n; ++i) {
    switch (coin(g)) {
      case 0: kb << P() << " sub " << P() << '\n'; break;
      case 1: kb << "(and " << P() << ' ' << P() << ") sub " << P() << '\n'; break;
      default: kb << "disjoint " << P() << ' ' << P() << '\n'; break;
    }
  }
  Dpi d;
  try {
    d.kb = parse_kb(kb.str());
  } catch (const std::exception&) {
    return std::nullopt;
  }
  int id = static_cast<int>(n) + 1;
  for (int i = 0, k = 1 + coin(g); i < k; ++i)
    d.background.push_back(make_axiom(id++, P() + (coin(g) ? "(a)" : "(b)")));
  if (coin(g) == 0) d.negative_tests.push_back(make_test({P() + "(a)"}, Polarity::Negative));
  d.requirements.coherence = coin(g) == 0;
  try {
    validate(d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!DiagnosisProblem(d).admissible()) return std::nullopt;
  return d;
}

Criterion p1() {
  Criterion c{"P1"};
  int checked = 0, nontrivial = 0, bad = 0;
  std::string first_bad;
  for (unsigned seed = 1; checked < 60 && seed < 10000; ++seed) {
    std::mt19937 g(seed);
    auto d = random_dpi(g);
    if (!d) continue;
    ++checked;
    DiagnosisProblem p(*d);
    auto conflicts = brute_force_minimal_conflicts(p);
    auto brute = as_set(brute_force_minimal_diagnoses(p));
    if (!conflicts.empty()) ++nontrivial;
    AxiomProbs probs = axiom_fault_probs(*d, FaultModel{});
    bool ok = as_set(minimal_hitting_sets(conflicts)) == brute &&
              as_set(hs_tree(p, probs, kUnbounded).diagnoses) == brute &&
              as_set(inv_hs_tree(p, kUnbounded, {}, probs)) == brute;
    if (!ok && bad++ == 0) first_bad = "seed " + std::to_string(seed);
  }
  c.add("duality on random instances", checked >= 50 && bad == 0 && nontrivial > 0,
        std::to_string(checked) + " instances, " + std::to_string(nontrivial) + " with conflicts" +
            (bad ? ", failing " + first_bad : ""));
  return c;
}

const std::vector<std::string> kFixtures = {"example1", "example2", "partdx", "rio", "intro"};

std::vector<IdSet> all_diagnoses(const Dpi& dpi) {
  DiagnosisProblem p(dpi);
  return brute_force_minimal_diagnoses(p);
}

Criterion p2() {
  Criterion c{"P2"};
  int runs = 0, exhausted = 0;
  std::string bad;
  for (const auto& name : kFixtures) {
    auto [dpi, m] = load(name);
    for (const auto& t : all_diagnoses(dpi)) {
      for (auto k : {StrategyKind::Entropy, StrategyKind::Split, StrategyKind::Rio, StrategyKind::Random}) {
        SessionConfig cfg;
        cfg.fault_model = m;
        cfg.sigma = 1.0;
        cfg.strategy.kind = k;
        ++runs;
        auto r = run_batch(dpi, cfg, t);
        SessionState s = start_session(dpi, cfg);
        s.dpi = replay(dpi, r.history);
        bool found = r.proposal.diagnosis.axiom_ids == t;
        // no atomic query separates what is left: the target must be among it
        if (r.status == SessionStatus::Exhausted) {
          found = std::find(r.remaining.begin(), r.remaining.end(), t) != r.remaining.end();
          ++exhausted;
        }
        bool ok = found && check_repair(s, r.proposal).valid();
        if (!ok && bad.empty()) bad = name + " " + strategy_name(k) + " target " + json(ids_to_json(t)).dump();
      }
    }
  }
  c.add("oracle diagnosis recovered and repair valid", bad.empty(),
        std::to_string(runs) + " runs, " + std::to_string(exhausted) + " exhausted" + (bad.empty() ? "" : ", first failure: " + bad));
  return c;
}

Criterion p3() {
  Criterion c{"P3"};
  std::mt19937 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool beliefs = true, likelihood = true;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + trial % 8;
    Belief b(n);
    for (auto& x : b) x = u(g);
    b = normalize(b);
    QPartition q;
    for (int i = 0; i < static_cast<int>(n); ++i) {
      double r = u(g);
      (r < 0.4 ? q.d_plus : r < 0.8 ? q.d_minus : q.d_zero).push_back(i);
    }
    auto [yes, no] = answer_likelihood(q, b);
    if (!near(yes + no, 1.0, 1e-9)) likelihood = false;
    for (Answer a : {Answer::Yes, Answer::No}) {
      if ((a == Answer::Yes ? yes : no) <= 0) continue;
      Belief nb = bayes_update(b, q, a);
      double s = 0;
      for (double x : nb) s += x;
      if (!near(s, 1.0, 1e-9)) beliefs = false;
    }
  }
  c.add("belief sums to 1 after update", beliefs);
  c.add("answer likelihoods sum to 1", likelihood);

  bool subsets = true;
  auto sum_all = [](const std::vector<Axiom>& kb, const AxiomProbs& probs) {
    double total = 0;
    for (unsigned mask = 0; mask < (1u << kb.size()); ++mask) {
      IdSet d;
      for (std::size_t i = 0; i < kb.size(); ++i)
        if (mask >> i & 1) d.insert(kb[i].id);
      total += diagnosis_prior(d, kb, probs);
    }
    return total;
  };
  for (const auto& name : kFixtures) {
    auto [dpi, m] = load(name);
    if (!near(sum_all(dpi.kb, axiom_fault_probs(dpi, m)), 1.0, 1e-9)) subsets = false;
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Axiom> kb;
    AxiomProbs probs;
    for (int i = 1; i <= 8; ++i) {
      kb.push_back(make_axiom(i, "A" + std::to_string(i) + " sub B"));
      probs[i] = u(g) * 0.5;
    }
    if (!near(sum_all(kb, probs), 1.0, 1e-9)) subsets = false;
  }
  c.add("priors over all subsets sum to 1", subsets);
  return c;
}

Criterion p4() {
  Criterion c{"P4"};
  bool minimal = true, ckk = true;
  std::string note;
  for (const auto& name : kFixtures) {
    auto [dpi, m] = load(name);
    DiagnosisProblem p(dpi);
    auto found = hs_tree(p, axiom_fault_probs(dpi, m), 9).diagnoses;
    std::vector<IdSet> leading;
    for (const auto& d : found) leading.push_back(d.axiom_ids);
    Belief b;
    for (const auto& d : found) b.push_back(d.prior);
    b = normalize(b);
    QueryEngine e(dpi);
    auto pool = e.generate_pool(leading);
    double best = 2.0;
    for (const auto& pe : pool) {
      best = std::min(best, score_entropy(pe.partition, b));
      if (e.classify(pe.query.formulas, leading) != pe.partition) minimal = false;
      for (std::size_t i = 0; pe.query.formulas.size() > 1 && i < pe.query.formulas.size(); ++i) {
        auto fewer = pe.query.formulas;
        fewer.erase(fewer.begin() + static_cast<long>(i));
        if (e.classify(fewer, leading) == pe.partition) minimal = false;
      }
    }
    auto hit = e.ckk_search(leading, b, 0.0);
    if (!hit || !near(score_entropy(hit->partition, b), best, 1e-9)) {
      ckk = false;
      note += name + " ";
    }
  }
  c.add("minimized queries keep their partition and are irreducible", minimal);
  c.add("CKK with gamma 0 reaches the pool minimum", ckk, note);
  return c;
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  int unexpected = 0;
  std::vector<std::pair<std::string, Criterion (*)()>> all = {
      {"G1", g1}, {"G2", g2}, {"G3", g3}, {"G4", g4}, {"G5", g5}, {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4}};
  for (auto [id, f] : all) {
    Criterion c{id};
    try {
      c = f();
    } catch (const std::exception& e) {
      c.add("threw", false, e.what());
    }
    bool pass = std::all_of(c.checks.begin(), c.checks.end(), [](const Check& k) { return k.ok; });
    std::cout << c.id << ' ' << (pass ? "PASS" : "FAIL") << '\n';
    for (const auto& k : c.checks) {
      std::cout << "   " << (k.ok ? "ok  " : k.known ? "KNOWN" : "FAIL") << "  " << k.what;
      if (!k.detail.empty()) std::cout << "  [" << k.detail << ']';
      std::cout << '\n';
      if (!k.ok && !k.known) ++unexpected;
    }
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "elapsed " << std::fixed << std::setprecision(1) << secs << " s\n";
  return unexpected == 0 && secs < 60 ? 0 : 1;
}
