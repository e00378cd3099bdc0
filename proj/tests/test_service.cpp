#include <gtest/gtest.h>

#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "kbdebug/serialize.hpp"
#include "kbdebug/service.hpp"

using namespace kbdebug;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = KBDEBUG_FIXTURES;

json fixture(const std::string& name) {
  std::ifstream in(kFixtures + "/" + name + ".json");
  return json::parse(in);
}

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("kbdebug-test-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string out;
};

// Runs the CLI with `input` on stdin and captures stdout.
CliRun cli(const std::string& args, const std::string& input = "") {
  fs::path dir = scratch("cli");
  std::ofstream(dir / "in.txt") << input;
  std::string cmd = std::string(KBDEBUG_CLI) + " " + args + " < " + (dir / "in.txt").string() + " > " +
                    (dir / "out.txt").string() + " 2> " + (dir / "err.txt").string();
  int rc = std::system(cmd.c_str());
  std::ifstream in(dir / "out.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, ss.str()};
}

json create_body(const std::string& name, json config = json::object()) {
  json f = fixture(name);
  if (config.empty() && f.contains("fault_model")) config["fault_model"] = f["fault_model"];
  return {{"dpi", f}, {"config", config}};
}

}  // namespace

// --- Api without a socket ----------------------------------------------------

class ApiTest : public ::testing::Test {
 protected:
  fs::path dir = scratch("api");
  SessionStore store{dir};
  Api api{store};
};

TEST_F(ApiTest, FullSessionOverTheApi) {
  ApiResponse r = api.handle("POST", "/sessions", create_body("example1").dump());
  ASSERT_EQ(r.status, 201) << r.body.dump();
  std::string id = r.body["session_id"];
  EXPECT_EQ(r.body["status"], "awaiting-answer");
  EXPECT_TRUE(fs::exists(dir / (id + ".json")));

  ApiResponse g = api.handle("GET", "/sessions/" + id, "");
  ASSERT_EQ(g.status, 200);
  EXPECT_TRUE(g.body.contains("snapshot"));

  for (int i = 0; i < 5 && r.body["status"] == "awaiting-answer"; ++i) {
    // oracle for D1: only entailments of O \ {ax1} count as yes
    std::string q = r.body["query"][0];
    r = api.handle("POST", "/sessions/" + id + "/answer", json{{"answer", "no"}}.dump());
    ASSERT_EQ(r.status, 200) << q;
  }
  EXPECT_EQ(r.body["status"], "converged");
  EXPECT_EQ(r.body["diagnosis"], json::parse("[1]"));

  ApiResponse late = api.handle("POST", "/sessions/" + id + "/answer", R"({"answer": "yes"})");
  EXPECT_EQ(late.status, 409);
  ApiResponse d = api.handle("GET", "/sessions/" + id + "/diagnoses", "");
  EXPECT_EQ(d.status, 200);
  EXPECT_EQ(d.body["leading"].size(), 1u);
}

TEST_F(ApiTest, ErrorCodes) {
  EXPECT_EQ(api.handle("GET", "/sessions/0123456789abcdef", "").status, 404);
  EXPECT_EQ(api.handle("GET", "/sessions/../../etc", "").status, 404);
  EXPECT_EQ(api.handle("GET", "/nowhere", "").status, 404);
  EXPECT_EQ(api.handle("POST", "/sessions", "{not json").status, 400);
  EXPECT_EQ(api.handle("POST", "/sessions", "{}").status, 400);

  json bad = create_body("example1");
  bad["dpi"]["kb"][1] = "B sub (and C";
  ApiResponse r = api.handle("POST", "/sessions", bad.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["line"], 2);

  json broken = create_body("example1");
  broken["dpi"]["background"].push_back("R(w)");
  EXPECT_EQ(api.handle("POST", "/sessions", broken.dump()).status, 400);

  ApiResponse ok = api.handle("POST", "/sessions", create_body("example1").dump());
  std::string id = ok.body["session_id"];
  EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/answer", R"({"answer": "maybe"})").status, 400);
  EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/answer", "{}").status, 400);
}

TEST_F(ApiTest, TestsEndpointAddsKnowledge) {
  ApiResponse r = api.handle("POST", "/sessions", create_body("example1").dump());
  std::string id = r.body["session_id"];
  r = api.handle("POST", "/sessions/" + id + "/tests", R"J({"formulas": ["C(w)"], "polarity": "negative"})J");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["leading"].size(), 2u);
  r = api.handle("POST", "/sessions/" + id + "/tests", R"J({"formulas": ["B(w)"], "polarity": "positive"})J");
  EXPECT_EQ(r.body["status"], "converged");
  EXPECT_EQ(r.body["diagnosis"], json::parse("[2]"));
}

TEST_F(ApiTest, SessionsSurviveARestart) {
  ApiResponse r = api.handle("POST", "/sessions", create_body("example2").dump());
  std::string id = r.body["session_id"];
  api.handle("POST", "/sessions/" + id + "/answer", R"({"answer": "yes"})");
  SessionStore again(dir);
  Api other(again);
  ApiResponse g = other.handle("GET", "/sessions/" + id, "");
  ASSERT_EQ(g.status, 200);
  EXPECT_EQ(g.body["queries_answered"], 1);
}

TEST_F(ApiTest, BatchEndpoint) {
  json req = {{"dpi", fixture("rio")},
              {"config", {{"sigma", 1.0}, {"fault_model", fixture("rio")["fault_model"]}}},
              {"targets", json::parse("[[2], [6]]")},
              {"strategies", {"ent", "spl"}}};
  ApiResponse r = api.handle("POST", "/debug/batch", req.dump());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const auto& row : r.body["rows"]) counts[{row["strategy"], row["target"].dump()}] = row["query_count"];
  EXPECT_EQ((counts[{"entropy", "[2]"}]), 4);
  EXPECT_EQ((counts[{"split", "[2]"}]), 3);
  EXPECT_EQ((counts[{"entropy", "[6]"}]), 2);
  EXPECT_EQ(api.handle("POST", "/debug/batch", R"({"dpi": {}})").status, 400);
}

// --- real HTTP -------------------------------------------------------------

TEST(Http, ServesTheApi) {
  fs::path dir = scratch("http");
  SessionStore store(dir);
  Api api(store);
  httplib::Server server;
  api.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/sessions", create_body("example1").dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  std::string id = json::parse(res->body)["session_id"];
  auto got = client.Get("/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  auto ans = client.Post("/sessions/" + id + "/answer", R"({"answer": "n"})", "application/json");
  ASSERT_TRUE(ans);
  EXPECT_EQ(ans->status, 200);
  auto missing = client.Get("/sessions/ffffffffffffffff");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  t.join();
}

// --- CLI -------------------------------------------------------------------

TEST(Cli, InteractiveSessionFindsTheDiagnosis) {
  CliRun r = cli("interactive --dpi " + kFixtures + "/example1.json", "n\nn\n");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("diagnosis: [ax1]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("status: converged"), std::string::npos);
}

TEST(Cli, ClosedInputAborts) {
  CliRun r = cli("interactive --dpi " + kFixtures + "/example1.json", "");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("status: aborted"), std::string::npos) << r.out;
}

TEST(Cli, BatchCsv) {
  CliRun r = cli("batch --dpi " + kFixtures + "/rio.json --target " + kFixtures +
              "/rio_target_d2.json --strategy ent,spl --sigma 1 --no-timing");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "kind,strategy,target,query_count,diagnosis,status,wall_ms,min,avg,max,error");
  EXPECT_NE(r.out.find("run,entropy,ax2,4,ax2,converged"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("run,split,ax2,3,ax2,converged"), std::string::npos) << r.out;

  CliRun d6 = cli("batch --dpi " + kFixtures + "/rio.json --target " + kFixtures + "/rio_target_d6.json --sigma 1");
  EXPECT_NE(d6.out.find("run,entropy,ax6,2,ax6,converged"), std::string::npos) << d6.out;

  CliRun e2 = cli("batch --dpi " + kFixtures + "/example2.json --target " + kFixtures +
               "/example2_target_d4.json --sigma 0.95 --mode static --no-timing");
  EXPECT_NE(e2.out.find("run,entropy,ax2 ax4,2,ax2 ax4,converged"), std::string::npos) << e2.out;
}

TEST(Cli, SolveAndBadInput) {
  CliRun r = cli("solve --dpi " + kFixtures + "/example2.json --n 4");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("[ax3]"), 0u) << r.out;
  EXPECT_NE(cli("solve --dpi /nonexistent.json").code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
}
