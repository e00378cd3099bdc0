#include "kbdebug/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>

#include "kbdebug/serialize.hpp"

namespace kbdebug {

using nlohmann::json;
namespace fs = std::filesystem;

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path SessionStore::file(const std::string& id) const { return dir_ / (id + ".json"); }

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  for (;;) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << gen();
    if (!exists(out.str())) return out.str();
  }
}

bool SessionStore::exists(const std::string& id) const {
  // ids are hex; anything else cannot name a file of ours
  if (id.empty() || !std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit((unsigned char)c); }))
    return false;
  return fs::exists(file(id));
}

std::optional<SessionState> SessionStore::load(const std::string& id) const {
  if (!exists(id)) return std::nullopt;
  std::ifstream in(file(id));
  return session_from_json(json::parse(in));
}

void SessionStore::save(const std::string& id, const SessionState& s) {
  fs::path tmp = dir_ / (id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << session_to_json(s).dump(2);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, file(id));
}

std::shared_ptr<std::mutex> SessionStore::lock_for(const std::string& id) {
  std::lock_guard g(table_mu_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

// ---- batch reports

std::vector<IdSet> targets_from_json(const json& j) {
  std::vector<IdSet> out;
  if (j.is_object()) {
    if (j.contains("targets")) return targets_from_json(j["targets"]);
    if (j.contains("target")) return {ids_from_json(j["target"])};
    throw std::invalid_argument("target file needs 'target' or 'targets'");
  }
  if (!j.is_array()) throw std::invalid_argument("targets must be a list");
  if (!j.empty() && !j.front().is_array()) return {ids_from_json(j)};
  for (const auto& t : j) out.push_back(ids_from_json(t));
  return out;
}

std::vector<BatchAggregate> aggregate(const std::vector<BatchRow>& rows) {
  std::vector<BatchAggregate> out;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const BatchAggregate& a) { return a.strategy == r.strategy; });
    if (it == out.end()) {
      out.push_back({r.strategy, r.query_count, 0.0, r.query_count});
      it = out.end() - 1;
    }
    it->min = std::min(it->min, r.query_count);
    it->max = std::max(it->max, r.query_count);
  }
  for (auto& a : out) {
    double sum = 0;
    int n = 0;
    for (const auto& r : rows)
      if (r.error.empty() && r.strategy == a.strategy) {
        sum += static_cast<double>(r.query_count);
        ++n;
      }
    a.avg = n ? sum / n : 0.0;
  }
  return out;
}

BatchReport batch_report(const Dpi& dpi, const SessionConfig& base, const std::vector<IdSet>& targets,
                         const std::vector<StrategyChoice>& strategies) {
  BatchReport rep;
  for (const auto& strat : strategies)
    for (const auto& t : targets) {
      BatchRow row;
      row.strategy = strategy_name(strat.kind);
      row.target = t;
      SessionConfig cfg = base;
      cfg.strategy = strat;
      auto t0 = std::chrono::steady_clock::now();
      try {
        BatchResult r = run_batch(dpi, cfg, t);
        row.query_count = r.query_count;
        row.diagnosis = r.proposal.diagnosis.axiom_ids;
        row.status = status_name(r.status);
      } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rep.rows.push_back(std::move(row));
    }
  rep.aggregates = aggregate(rep.rows);
  return rep;
}

namespace {

std::string ids_text(const IdSet& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "ax" : " ax") + std::to_string(id);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string report_csv(const BatchReport& r, bool timing) {
  std::ostringstream out;
  out << "kind,strategy,target,query_count,diagnosis,status,wall_ms,min,avg,max,error\n";
  for (const auto& row : r.rows) {
    out << "run," << row.strategy << ',' << ids_text(row.target) << ',' << row.query_count << ','
        << ids_text(row.diagnosis) << ',' << row.status << ',';
    if (timing) out << std::fixed << std::setprecision(3) << row.wall_ms << std::defaultfloat;
    out << ",,,," << csv_field(row.error) << '\n';
  }
  for (const auto& a : r.aggregates)
    out << "aggregate," << a.strategy << ",,,,,," << a.min << ',' << std::setprecision(6) << a.avg << ','
        << a.max << ",\n";
  return out.str();
}

json report_json(const BatchReport& r) {
  json rows = json::array(), aggs = json::array();
  for (const auto& row : r.rows) {
    json j{{"strategy", row.strategy}, {"target", ids_to_json(row.target)}, {"query_count", row.query_count},
           {"diagnosis", ids_to_json(row.diagnosis)}, {"status", row.status}, {"wall_ms", row.wall_ms}};
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(j);
  }
  for (const auto& a : r.aggregates)
    aggs.push_back({{"strategy", a.strategy}, {"min", a.min}, {"avg", a.avg}, {"max", a.max}});
  return {{"rows", rows}, {"aggregate", aggs}};
}

// ---- HTTP

namespace {

ApiResponse error(int status, const std::string& msg) { return {status, {{"error", msg}}}; }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path.substr(0, path.find('?'))) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

json with_id(json v, const std::string& id) {
  v["session_id"] = id;
  return v;
}

}  // namespace

ApiResponse Api::handle(const std::string& method, const std::string& path, const std::string& body) {
  auto parts = split_path(path);
  json req;
  if (method == "POST") {
    try {
      req = body.empty() ? json::object() : json::parse(body);
    } catch (const json::parse_error& e) {
      return error(400, std::string("malformed JSON: ") + e.what());
    }
  }
  try {
    if (parts.size() == 1 && parts[0] == "sessions" && method == "POST") return create(req);
    if (parts.size() == 2 && parts[0] == "debug" && parts[1] == "batch" && method == "POST") return batch(req);
    if (parts.size() >= 2 && parts[0] == "sessions") {
      const std::string& id = parts[1];
      if (parts.size() == 2 && method == "GET") return get(id);
      if (parts.size() == 3 && parts[2] == "answer" && method == "POST") return answer(id, req);
      if (parts.size() == 3 && parts[2] == "tests" && method == "POST") return add_test(id, req);
      if (parts.size() == 3 && parts[2] == "diagnoses" && method == "GET") return diagnoses(id);
    }
    return error(404, "no route for " + method + " " + path);
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

ApiResponse Api::create(const json& req) {
  if (!req.is_object() || !req.contains("dpi")) return error(400, "request needs a 'dpi' object");
  SessionState s;
  try {
    Dpi dpi = dpi_from_json(req["dpi"]);
    SessionConfig cfg = config_from_json(req.value("config", json::object()));
    s = start_session(dpi, cfg);
  } catch (const InadmissibleDpi& e) {
    return error(400, e.what());
  } catch (const ParseError& e) {
    return {400, {{"error", e.what()}, {"line", e.line()}, {"column", e.column()}}};
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const std::runtime_error& e) {
    // DpiError, GroundingError, json type errors
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
  std::string id = store_.fresh_id();
  auto mu = store_.lock_for(id);
  std::lock_guard g(*mu);
  store_.save(id, s);
  return {201, with_id(session_view(s), id)};
}

ApiResponse Api::get(const std::string& id) {
  auto mu = store_.lock_for(id);
  std::lock_guard g(*mu);
  auto s = store_.load(id);
  if (!s) return error(404, "unknown session " + id);
  json v = with_id(session_view(*s), id);
  v["snapshot"] = session_to_json(*s);
  return {200, v};
}

ApiResponse Api::answer(const std::string& id, const json& req) {
  auto mu = store_.lock_for(id);
  std::lock_guard g(*mu);
  auto s = store_.load(id);
  if (!s) return error(404, "unknown session " + id);
  Answer a;
  try {
    a = parse_answer(req.at("answer").get<std::string>());
  } catch (const std::exception& e) {
    return error(400, "answer must be yes, no or skip");
  }
  if (s->status != SessionStatus::AwaitingAnswer || !s->pending)
    return {409, {{"error", "no pending query"}, {"status", status_name(s->status)}}};
  submit_answer(*s, a);
  store_.save(id, *s);
  return {200, with_id(session_view(*s), id)};
}

ApiResponse Api::add_test(const std::string& id, const json& req) {
  auto mu = store_.lock_for(id);
  std::lock_guard g(*mu);
  auto s = store_.load(id);
  if (!s) return error(404, "unknown session " + id);
  if (s->status != SessionStatus::AwaitingAnswer) return error(409, "session is " + status_name(s->status));
  try {
    TestCase t = make_test(req.at("formulas").get<std::vector<std::string>>(),
                           req.value("polarity", std::string("positive")) == "negative" ? Polarity::Negative
                                                                                        : Polarity::Positive);
    add_test_case(*s, t.formulas, t.polarity);
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
  store_.save(id, *s);
  return {200, with_id(session_view(*s), id)};
}

ApiResponse Api::diagnoses(const std::string& id) {
  auto mu = store_.lock_for(id);
  std::lock_guard g(*mu);
  auto s = store_.load(id);
  if (!s) return error(404, "unknown session " + id);
  json lead = json::array();
  for (const auto& d : s->leading) lead.push_back(diagnosis_to_json(d));
  return {200, {{"session_id", id}, {"status", status_name(s->status)}, {"leading", lead}}};
}

ApiResponse Api::batch(const json& req) {
  try {
    Dpi dpi = dpi_from_json(req.at("dpi"));
    SessionConfig cfg = config_from_json(req.value("config", json::object()));
    std::vector<IdSet> targets = targets_from_json(req.at("targets"));
    std::vector<StrategyChoice> strategies;
    if (req.contains("strategies")) {
      for (const auto& s : req["strategies"]) {
        StrategyChoice c = strategy_from_json(s);
        if (s.is_string()) c.seed = cfg.strategy.seed;
        strategies.push_back(c);
      }
    } else {
      strategies.push_back(cfg.strategy);
    }
    return {200, report_json(batch_report(dpi, cfg, targets, strategies))};
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
}

void Api::mount(httplib::Server& server) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(".*", route);
  server.Post(".*", route);
}

fs::path default_data_dir() {
  if (const char* d = std::getenv("KBDEBUG_DATA_DIR"); d && *d) return d;
  return fs::current_path() / "kbdebug-data";
}

int serve(const std::string& host, int port, const fs::path& data_dir) {
  SessionStore store(data_dir);
  Api api(store);
  httplib::Server server;
  api.mount(server);
  if (!server.listen(host, port)) return 1;
  return 0;
}

}  // namespace kbdebug
