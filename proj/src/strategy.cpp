#include "kbdebug/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace kbdebug {

using nlohmann::json;

StrategyKind parse_strategy_kind(const std::string& s) {
  if (s == "random" || s == "rnd") return StrategyKind::Random;
  if (s == "split" || s == "spl") return StrategyKind::Split;
  if (s == "entropy" || s == "ent") return StrategyKind::Entropy;
  if (s == "rio") return StrategyKind::Rio;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Split: return "split";
    case StrategyKind::Entropy: return "entropy";
    case StrategyKind::Rio: return "rio";
  }
  return "?";
}

StrategyChoice strategy_from_json(const json& j) {
  StrategyChoice s;
  if (j.is_string()) {
    s.kind = parse_strategy_kind(j.get<std::string>());
    return s;
  }
  s.kind = parse_strategy_kind(j.value("kind", std::string("entropy")));
  s.seed = j.value("seed", std::uint64_t{42});
  s.rio.c = j.value("c", s.rio.c);
  s.rio.c_min = j.value("c_min", s.rio.c_min);
  s.rio.c_max = j.value("c_max", s.rio.c_max);
  s.rio.epsilon = j.value("epsilon", s.rio.epsilon);
  const auto& r = s.rio;
  if (!(r.c_min <= r.c && r.c <= r.c_max)) throw std::invalid_argument("rio needs c_min <= c <= c_max");
  if (!(r.epsilon > 0.0 && r.epsilon < 0.5)) throw std::invalid_argument("rio epsilon must lie in (0, 1/2)");
  return s;
}

json strategy_to_json(const StrategyChoice& s) {
  json j{{"kind", strategy_name(s.kind)}, {"seed", s.seed}};
  if (s.kind == StrategyKind::Rio) {
    j["c"] = s.rio.c;
    j["c_min"] = s.rio.c_min;
    j["c_max"] = s.rio.c_max;
    j["epsilon"] = s.rio.epsilon;
  }
  return j;
}

double score_split(const QPartition& q) {
  double diff = std::abs(static_cast<double>(q.d_plus.size()) - static_cast<double>(q.d_minus.size()));
  return diff + static_cast<double>(q.d_zero.size());
}

double score_entropy(const QPartition& q, const Belief& b) {
  auto [yes, no] = answer_likelihood(q, b);
  double zero = 0;
  for (int i : q.d_zero) zero += b[i];
  auto term = [](double p) { return p > 0 ? p * std::log2(p) : 0.0; };
  // rounding can push a perfect split a hair below zero
  return std::max(0.0, term(yes) + term(no) + zero + 1.0);
}

double query_cautiousness(const QPartition& q, std::size_t leading_count) {
  if (leading_count == 0) return 0.0;
  return static_cast<double>(std::min(q.d_plus.size(), q.d_minus.size())) / leading_count;
}

double elimination_rate(const QPartition& q, Answer a, std::size_t leading_count) {
  if (leading_count == 0 || a == Answer::Skip) return 0.0;
  std::size_t gone = a == Answer::Yes ? q.d_minus.size() : q.d_plus.size();
  return static_cast<double>(gone) / leading_count;
}

RioState rio_update(RioState s, const QPartition& q, Answer a, std::size_t leading_count) {
  if (leading_count == 0 || a == Answer::Skip) return s;
  double n = static_cast<double>(leading_count);
  double adj = std::floor(n / 2.0 - s.epsilon) / n - elimination_rate(q, a, leading_count);
  s.c = std::clamp(s.c + 2.0 * (s.c_max - s.c_min) * adj, s.c_min, s.c_max);
  return s;
}

namespace {

std::size_t argmin(const std::vector<PoolEntry>& pool, const std::vector<double>& score,
                   const std::vector<std::size_t>& among) {
  std::size_t best = among.front();
  for (std::size_t i : among)
    if (query_preferred(score[i], pool[i].query, score[best], pool[best].query)) best = i;
  return best;
}

}  // namespace

std::size_t select_query(const std::vector<PoolEntry>& pool, const Belief& b, const StrategyChoice& choice,
                         std::uint64_t draw) {
  if (pool.empty()) throw std::invalid_argument("cannot select from an empty query pool");
  std::vector<std::size_t> all(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) all[i] = i;

  if (choice.kind == StrategyKind::Random) {
    std::seed_seq seq{static_cast<std::uint32_t>(choice.seed), static_cast<std::uint32_t>(choice.seed >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    std::mt19937_64 gen(seq);
    return static_cast<std::size_t>(gen() % pool.size());
  }

  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    score[i] = choice.kind == StrategyKind::Split ? score_split(pool[i].partition)
                                                  : score_entropy(pool[i].partition, b);
  std::size_t best = argmin(pool, score, all);
  if (choice.kind != StrategyKind::Rio) return best;

  std::size_t n = b.size();
  const double eps = 1e-12;
  auto qc = [&](std::size_t i) { return query_cautiousness(pool[i].partition, n); };
  double c = choice.rio.c;
  if (qc(best) >= c - eps) return best;
  // the least cautious among those at or above c
  std::vector<std::size_t> safe;
  double lowest = 2.0;
  for (std::size_t i : all)
    if (qc(i) >= c - eps) lowest = std::min(lowest, qc(i));
  for (std::size_t i : all)
    if (qc(i) >= c - eps && std::abs(qc(i) - lowest) <= eps) safe.push_back(i);
  if (safe.empty()) return best;
  return argmin(pool, score, safe);
}

}  // namespace kbdebug
