#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kbdebug/query.hpp"
#include "kbdebug/strategy.hpp"

namespace kbdebug {

enum class Engine { Conflict, Direct };
enum class Mode { Static, Dynamic };
enum class SessionStatus { AwaitingAnswer, Converged, Exhausted, Aborted, Contradiction };

std::string engine_name(Engine e);
std::string mode_name(Mode m);
std::string status_name(SessionStatus s);
std::string answer_name(Answer a);
Engine parse_engine(const std::string& s);
Mode parse_mode(const std::string& s);
SessionStatus parse_status(const std::string& s);
Answer parse_answer(const std::string& s);

struct SessionConfig {
  std::size_t n_leading = 9;
  double sigma = 0.85;
  Engine engine = Engine::Conflict;
  Mode mode = Mode::Dynamic;
  StrategyChoice strategy;
  FaultModel fault_model;
  std::optional<double> gamma;  // CKK shortcut, entropy and rio only
  int witness_budget = 1;
  std::size_t max_queries = 200;
};

// One step of the append-only history. Answers carry the partition against the
// leading set of that moment; user-added tests carry only formulas.
struct HistoryEntry {
  enum class Kind { Answer, Test };
  Kind kind = Kind::Answer;
  std::vector<Formula> formulas;
  QPartition partition;
  Answer answer = Answer::Yes;  // for tests: Yes = positive, No = negative
  std::vector<IdSet> leading;
};

struct SessionState {
  SessionConfig config;
  Dpi initial;
  Dpi dpi;  // initial plus every yes/no answer and added test
  std::vector<Diagnosis> leading;
  Belief belief;
  RioState rio;
  std::vector<HistoryEntry> history;
  SessionStatus status = SessionStatus::AwaitingAnswer;
  std::optional<PoolEntry> pending;
  std::vector<std::vector<std::string>> skipped;  // since the last real answer
  std::uint64_t draws = 0;
  std::string message;

  std::size_t queries_answered() const;
};

struct RepairProposal {
  Diagnosis diagnosis;
  std::vector<Axiom> solution_kb;  // (O \ D) ∪ ⋃P
};

class NoDiagnosisExists : public InadmissibleDpi {};

// The instance after replaying answers and added tests onto `initial`.
Dpi replay(const Dpi& initial, const std::vector<HistoryEntry>& history);

SessionState start_session(const Dpi& dpi, const SessionConfig& config);
// Pending query, chosen on demand. nullopt when the pool is empty.
std::optional<PoolEntry> next_query(SessionState& s);
void submit_answer(SessionState& s, Answer a);
// Folds an answer for an arbitrary formula set (not necessarily from the pool).
void answer_query(SessionState& s, const std::vector<Formula>& q, Answer a);
void add_test_case(SessionState& s, const std::vector<Formula>& formulas, Polarity pol);

struct StopDecision {
  bool converged = false;
  std::optional<Diagnosis> best;
};
StopDecision stop_check(const SessionState& s, double sigma);

RepairProposal repair_proposal(const SessionState& s);
// Validity of the solution KB as a DPI with an empty kb part.
ValidityReport check_repair(const SessionState& s, const RepairProposal& r);

struct BatchResult {
  RepairProposal proposal;
  std::size_t query_count = 0;
  std::vector<HistoryEntry> history;
  SessionStatus status = SessionStatus::Converged;
  std::vector<IdSet> remaining;  // leading set at the end, several when exhausted
};
// Oracle: yes iff (O \ target) ∪ B ∪ ⋃P entails the query.
BatchResult run_batch(const Dpi& dpi, const SessionConfig& config, const IdSet& target);

struct DebugLimits {
  std::size_t n = 1;
  std::optional<std::chrono::milliseconds> time;
};
HsTreeResult non_interactive_debug(const Dpi& dpi, const FaultModel& m, const DebugLimits& limits,
                                   int witness_budget = 1);

}  // namespace kbdebug
