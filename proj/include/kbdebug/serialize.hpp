#pragma once

#include <json.hpp>

#include "kbdebug/session.hpp"

namespace kbdebug {

nlohmann::json ids_to_json(const IdSet& ids);
IdSet ids_from_json(const nlohmann::json& j);
nlohmann::json partition_to_json(const QPartition& p);
QPartition partition_from_json(const nlohmann::json& j);
nlohmann::json diagnosis_to_json(const Diagnosis& d);
nlohmann::json proposal_to_json(const RepairProposal& r);

SessionConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SessionConfig& c);

// Snapshot: initial DPI, config, history, leading set, belief and strategy
// state. The current DPI is rebuilt from the history on load.
nlohmann::json session_to_json(const SessionState& s);
SessionState session_from_json(const nlohmann::json& j);

// What clients poll: status, pending query, leading with posteriors.
nlohmann::json session_view(const SessionState& s);

}  // namespace kbdebug
