// debug: batch experiments, terminal sessions, non-interactive diagnosis and the HTTP service.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kbdebug/serialize.hpp"
#include "kbdebug/service.hpp"

using namespace kbdebug;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct ConfigFlags {
  std::string dpi_path;
  std::optional<std::string> fault_model;
  std::optional<double> sigma;
  std::optional<std::size_t> n;
  std::optional<std::string> engine, mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<int> witness_budget;

  void add(CLI::App* app) {
    app->add_option("--dpi", dpi_path, "instance JSON (kb, background, tests, optional fault_model/config)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--fault-model", fault_model, "fault model JSON, overrides the instance's");
    app->add_option("--sigma", sigma, "acceptance threshold on p1 - p2");
    app->add_option("--n", n, "number of leading diagnoses");
    app->add_option("--engine", engine, "conflict | direct")->check(CLI::IsMember({"conflict", "direct"}));
    app->add_option("--mode", mode, "static | dynamic")->check(CLI::IsMember({"static", "dynamic"}));
    app->add_option("--seed", seed, "seed for the random strategy");
    app->add_option("--gamma", gamma, "CKK early-stop threshold (entropy)");
    app->add_option("--witness-budget", witness_budget, "grounding witnesses per quantifier");
  }

  std::pair<Dpi, SessionConfig> load() const {
    json j = read_json(dpi_path);
    Dpi dpi = dpi_from_json(j);
    SessionConfig cfg = config_from_json(j.value("config", json::object()));
    if (j.contains("fault_model")) cfg.fault_model = fault_model_from_json(j["fault_model"]);
    if (fault_model) cfg.fault_model = fault_model_from_json(read_json(*fault_model));
    if (sigma) cfg.sigma = *sigma;
    if (n) cfg.n_leading = *n;
    if (engine) cfg.engine = parse_engine(*engine);
    if (mode) cfg.mode = parse_mode(*mode);
    if (seed) cfg.strategy.seed = *seed;
    if (gamma) cfg.gamma = *gamma;
    if (witness_budget) cfg.witness_budget = *witness_budget;
    return {dpi, cfg};
  }
};

std::string ids_text(const IdSet& ids) {
  std::string s = "[";
  for (int id : ids) s += (s.size() > 1 ? ", ax" : "ax") + std::to_string(id);
  return s + "]";
}

void print_leading(const SessionState& s, std::ostream& out) {
  for (const auto& d : s.leading) out << "  " << ids_text(d.axiom_ids) << "  p=" << d.posterior << '\n';
}

int run_interactive(const ConfigFlags& flags, const std::optional<std::string>& strategy,
                    const std::optional<std::string>& snapshot) {
  auto [dpi, cfg] = flags.load();
  if (strategy) {
    std::uint64_t seed = cfg.strategy.seed;
    cfg.strategy = strategy_from_json(*strategy);
    cfg.strategy.seed = seed;
  }
  SessionState s = start_session(dpi, cfg);
  std::cout << "leading diagnoses:\n";
  print_leading(s, std::cout);
  std::string line;
  while (s.status == SessionStatus::AwaitingAnswer && s.pending) {
    std::cout << "query:";
    for (const auto& t : texts(s.pending->query.formulas)) std::cout << "  " << t;
    std::cout << "\nentailed by the intended KB? [y/n/s] " << std::flush;
    if (!std::getline(std::cin, line)) {
      s.status = SessionStatus::Aborted;
      s.pending.reset();
      s.message = "input closed";
      std::cout << "\naborted\n";
      break;
    }
    Answer a;
    try {
      a = parse_answer(line);
    } catch (const std::invalid_argument&) {
      std::cout << "please answer y, n or s\n";
      continue;
    }
    submit_answer(s, a);
    print_leading(s, std::cout);
  }
  std::cout << "status: " << status_name(s.status) << '\n';
  if (s.status != SessionStatus::Aborted && !s.leading.empty()) {
    RepairProposal r = repair_proposal(s);
    std::cout << "diagnosis: " << ids_text(r.diagnosis.axiom_ids) << '\n' << "solution kb:\n";
    for (const auto& a : r.solution_kb) std::cout << "  " << a.text << '\n';
  }
  if (snapshot) {
    std::ofstream out(*snapshot);
    out << session_to_json(s).dump(2);
  }
  if (s.status == SessionStatus::Aborted) return 3;
  return s.status == SessionStatus::Contradiction ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive knowledge-base debugger"};
  app.require_subcommand(1);

  auto* batch = app.add_subcommand("batch", "run oracle-driven sessions and write a CSV report");
  ConfigFlags batch_flags;
  batch_flags.add(batch);
  std::string target_path, strategies = "ent", out_path;
  bool no_timing = false;
  batch->add_option("--target", target_path, "target diagnosis JSON")->required()->check(CLI::ExistingFile);
  batch->add_option("--strategy", strategies, "comma list of ent, spl, rio, random");
  batch->add_option("--out", out_path, "CSV output (stdout if omitted)");
  batch->add_flag("--no-timing", no_timing, "leave the wall_ms column empty");

  auto* inter = app.add_subcommand("interactive", "answer queries on the terminal");
  ConfigFlags inter_flags;
  inter_flags.add(inter);
  std::optional<std::string> inter_strategy, snapshot;
  inter->add_option("--strategy", inter_strategy, "ent, spl, rio or random");
  inter->add_option("--snapshot", snapshot, "write the final session snapshot here");

  auto* solve = app.add_subcommand("solve", "most probable minimal diagnoses, no interaction");
  ConfigFlags solve_flags;
  solve_flags.add(solve);
  std::optional<long> time_ms;
  solve->add_option("--time-ms", time_ms, "time budget");

  auto* serve_cmd = app.add_subcommand("serve", "HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::string> data_dir;
  serve_cmd->add_option("--port", port, "listen port");
  serve_cmd->add_option("--host", host, "listen address");
  serve_cmd->add_option("--data-dir", data_dir, "session directory (default $KBDEBUG_DATA_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*batch) {
      auto [dpi, cfg] = batch_flags.load();
      std::vector<IdSet> targets = targets_from_json(read_json(target_path));
      std::vector<StrategyChoice> choices;
      std::stringstream ss(strategies);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        StrategyChoice c = cfg.strategy;
        c.kind = parse_strategy_kind(name);
        choices.push_back(c);
      }
      BatchReport rep = batch_report(dpi, cfg, targets, choices);
      std::string csv = report_csv(rep, !no_timing);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(out_path);
        out << csv;
      }
      for (const auto& r : rep.rows)
        if (!r.error.empty()) std::cerr << r.strategy << ' ' << ids_text(r.target) << ": " << r.error << '\n';
      return 0;
    }
    if (*inter) return run_interactive(inter_flags, inter_strategy, snapshot);
    if (*solve) {
      auto [dpi, cfg] = solve_flags.load();
      DebugLimits lim;
      lim.n = solve_flags.n.value_or(1);
      if (time_ms) lim.time = std::chrono::milliseconds(*time_ms);
      HsTreeResult r = non_interactive_debug(dpi, cfg.fault_model, lim, cfg.witness_budget);
      for (const auto& d : r.diagnoses)
        std::cout << ids_text(d.axiom_ids) << "  prior=" << d.prior << "  p=" << d.posterior << '\n';
      if (!r.complete) {
        std::cout << "incomplete: time budget exhausted\n";
        return 2;
      }
      return 0;
    }
    if (*serve_cmd) {
      auto dir = data_dir ? std::filesystem::path(*data_dir) : default_data_dir();
      std::cerr << "listening on " << host << ':' << port << ", data in " << dir << '\n';
      return serve(host, port, dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
