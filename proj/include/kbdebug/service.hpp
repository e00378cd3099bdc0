#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "kbdebug/session.hpp"

namespace httplib {
class Server;
}

namespace kbdebug {

// One JSON file per session; writes go through a temp file and a rename.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::string fresh_id();
  bool exists(const std::string& id) const;
  std::optional<SessionState> load(const std::string& id) const;
  void save(const std::string& id, const SessionState& s);
  // Serializes mutations of one session.
  std::shared_ptr<std::mutex> lock_for(const std::string& id);

 private:
  std::filesystem::path file(const std::string& id) const;

  std::filesystem::path dir_;
  std::mutex table_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

struct BatchRow {
  std::string strategy;
  IdSet target;
  std::size_t query_count = 0;
  IdSet diagnosis;
  std::string status;
  double wall_ms = 0;
  std::string error;
};

struct BatchAggregate {
  std::string strategy;
  std::size_t min = 0;
  double avg = 0;
  std::size_t max = 0;
};

struct BatchReport {
  std::vector<BatchRow> rows;
  std::vector<BatchAggregate> aggregates;
};

BatchReport batch_report(const Dpi& dpi, const SessionConfig& base, const std::vector<IdSet>& targets,
                         const std::vector<StrategyChoice>& strategies);
std::vector<BatchAggregate> aggregate(const std::vector<BatchRow>& rows);
std::string report_csv(const BatchReport& r, bool timing = true);
nlohmann::json report_json(const BatchReport& r);
// Accepts [[..],..], [..], {"target": [..]} or {"targets": [[..],..]}.
std::vector<IdSet> targets_from_json(const nlohmann::json& j);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Request handling without a socket, so it can be driven directly in tests.
class Api {
 public:
  explicit Api(SessionStore& store) : store_(store) {}

  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);
  void mount(httplib::Server& server);

 private:
  ApiResponse create(const nlohmann::json& req);
  ApiResponse get(const std::string& id);
  ApiResponse answer(const std::string& id, const nlohmann::json& req);
  ApiResponse add_test(const std::string& id, const nlohmann::json& req);
  ApiResponse diagnoses(const std::string& id);
  ApiResponse batch(const nlohmann::json& req);

  SessionStore& store_;
};

std::filesystem::path default_data_dir();
// Blocks until the server stops.
int serve(const std::string& host, int port, const std::filesystem::path& data_dir);

}  // namespace kbdebug
