#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbdebug/query.hpp"

namespace kbdebug {

enum class StrategyKind { Random, Split, Entropy, Rio };

struct RioState {
  double c = 0.25;
  double c_min = 0.0;
  double c_max = 4.0 / 9.0;
  double epsilon = 0.25;
};

struct StrategyChoice {
  StrategyKind kind = StrategyKind::Entropy;
  RioState rio;
  std::uint64_t seed = 42;
};

StrategyKind parse_strategy_kind(const std::string& s);
std::string strategy_name(StrategyKind k);
StrategyChoice strategy_from_json(const nlohmann::json& j);
nlohmann::json strategy_to_json(const StrategyChoice& s);

double score_split(const QPartition& q);
double score_entropy(const QPartition& q, const Belief& b);
double query_cautiousness(const QPartition& q, std::size_t leading_count);
double elimination_rate(const QPartition& q, Answer a, std::size_t leading_count);
RioState rio_update(RioState s, const QPartition& q, Answer a, std::size_t leading_count);

// Index of the chosen pool entry. `draw` distinguishes successive random picks.
std::size_t select_query(const std::vector<PoolEntry>& pool, const Belief& b, const StrategyChoice& choice,
                         std::uint64_t draw = 0);

}  // namespace kbdebug
