#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "httplib.h"
#include "riskpref/error.hpp"
#include "riskpref/interface.hpp"

using namespace riskpref;
using namespace riskpref::interface;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json kLikert = {{"likert",
                       {{"general", 5},
                        {"occupation", 4},
                        {"health", nullptr},
                        {"personal_finances", 6},
                        {"job_finances", 3}}}};

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("riskpref_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void complete(SessionStore& store, const std::string& id, const std::string& choices = "AAAAAAAAAA") {
  for (int t = 1; t <= 5; ++t) store.submit(id, {{"task_id", t}, {"choices", choices}});
  store.submit(id, kLikert);
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "riskpref");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int rc = cli_run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("session state machine") {
  SessionStore store(std::nullopt, 1, [] { return std::int64_t{1700000000}; });
  const auto id = store.create();
  CHECK(id.size() == 16);
  auto s = store.snapshot(id);
  CHECK(s.status() == SessionStatus::in_progress);
  CHECK(s.pending_task() == 1);
  CHECK(s.created_at == 1700000000);

  const auto task = store.next_task(id);
  CHECK(task["kind"] == "mpl");
  CHECK(task["step"] == 1);
  CHECK(task["of"] == 6);
  CHECK(task["task"]["rows"].size() == 10);

  CHECK_THROWS_AS(store.submit(id, {{"task_id", 2}, {"choices", "AAAAAAAAAA"}}), ConflictError);
  CHECK_THROWS_AS(store.submit(id, kLikert), ConflictError);
  CHECK_THROWS_AS(store.scores(id), ConflictError);
  CHECK_THROWS_AS(store.submit(id, {{"task_id", 1}, {"choices", "AAAAXAAAAA"}}), ValidationError);
  CHECK_THROWS_AS(store.submit(id, json::array()), ValidationError);

  const auto r = store.submit(id, {{"task_id", 1}, {"choices", json::array({"A", "A", "B", "A", "B", "B", "B", "B", "B", "B"})}});
  CHECK(r["completed_steps"] == 1);
  CHECK(r["consistency"]["switch_count"] == 3);
  CHECK(r["consistency"]["multiple_switch"] == true);
  CHECK_THROWS_WITH_AS(store.submit(id, {{"task_id", 1}, {"choices", "AAAAAAAAAA"}}),
                       doctest::Contains("already submitted"), ConflictError);

  CHECK_THROWS_AS(store.snapshot("missing"), NotFoundError);
}

TEST_CASE("scripted all-safe session") {
  SessionStore store;
  const auto id = store.create();
  complete(store, id);
  const auto s = store.snapshot(id);
  CHECK(s.status() == SessionStatus::complete);
  CHECK(store.next_task(id)["kind"] == "complete");
  const auto sc = store.scores(id);
  CHECK(sc["mpl_avg_safe"] == 10.0);
  CHECK(sc["risk_grq"] == 5);
  CHECK(sc["likert"]["health"].is_null());
  CHECK(sc["per_task"].size() == 5);
  CHECK_THROWS_AS(store.submit(id, kLikert), ConflictError);
}

TEST_CASE("session_scores refuses incomplete sessions") {
  SessionState s;
  CHECK_THROWS_WITH_AS(session_scores(s), doctest::Contains("session incomplete"), ConflictError);
}

TEST_CASE("Likert validation names the field") {
  SessionStore store;
  const auto id = store.create();
  for (int t = 1; t <= 5; ++t) store.submit(id, {{"task_id", t}, {"choices", "BBBBBBBBBB"}});
  auto bad = kLikert;
  bad["likert"]["general"] = "five";
  try {
    store.submit(id, bad);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "likert.general");
  }
  bad = kLikert;
  bad["likert"]["occupation"] = 12;
  CHECK_THROWS_AS(store.submit(id, bad), ValidationError);
  CHECK(store.snapshot(id).status() == SessionStatus::in_progress);
}

TEST_CASE("event log replay restores identical state") {
  TempDir dir;
  std::vector<std::string> ids;
  std::string csv;
  {
    SessionStore store(dir.path, 5, [] { return std::int64_t{42}; });
    ids.push_back(store.create());
    ids.push_back(store.create());
    complete(store, ids[0], "AAAABBBBBB");
    store.submit(ids[1], {{"task_id", 1}, {"choices", "ABABABABAB"}});
    csv = store.export_csv({});
  }
  SessionStore again(dir.path, 5);
  CHECK(again.ids() == std::vector<std::string>{std::min(ids[0], ids[1]), std::max(ids[0], ids[1])});
  const auto a = again.snapshot(ids[0]);
  CHECK(a.status() == SessionStatus::complete);
  CHECK(a.created_at == 42);
  CHECK(again.snapshot(ids[1]).completed_steps() == 1);
  CHECK(again.export_csv({}) == csv);
  const auto third = again.create();
  CHECK(third != ids[0]);
  CHECK(third != ids[1]);

  std::ofstream(dir.path / (ids[1] + ".jsonl"), std::ios::app) << "{not json\n";
  CHECK_THROWS_AS(SessionStore(dir.path, 5), Error);
}

TEST_CASE("export round-trips through the CSV reader") {
  SessionStore store;
  const auto a = store.create();
  const auto b = store.create();
  const auto c = store.create();
  complete(store, a);
  complete(store, b, "AAAAABBBBB");
  std::istringstream in(store.export_csv({}));
  const auto t = read_csv(in);
  CHECK(t.rows() == 2);
  REQUIRE(t.mpl_avg_safe.has_value());
  std::map<std::string, double> by_id;
  for (std::size_t i = 0; i < t.rows(); ++i) by_id[t.ids[i]] = (*t.mpl_avg_safe)[i];
  CHECK(by_id[a] == 10.0);
  CHECK(by_id[b] == 5.0);
  CHECK(t.column("likert_health").is_missing(0));
  CHECK((*t.risk_grq)[0] == 5.0);

  const std::vector<std::string> pick{b};
  std::istringstream one(store.export_csv(pick));
  CHECK(read_csv(one).rows() == 1);
  const std::vector<std::string> incomplete{c};
  CHECK_THROWS_AS(store.export_csv(incomplete), ConflictError);
  const std::vector<std::string> unknown{"nope"};
  CHECK_THROWS_AS(store.export_csv(unknown), NotFoundError);
}

TEST_CASE("service routing and error mapping") {
  SessionStore store;
  const Service svc(store);
  const auto created = svc.handle("POST", "/sessions", "", "");
  CHECK(created.status == 201);
  const std::string id = json::parse(created.body)["session_id"];
  CHECK(svc.handle("GET", "/sessions/" + id, "", "").status == 200);
  CHECK(svc.handle("GET", "/sessions/zzz", "", "").status == 404);
  CHECK(svc.handle("GET", "/nowhere", "", "").status == 404);

  const auto bad = svc.handle("POST", "/sessions/" + id + "/choices", "", "{oops");
  CHECK(bad.status == 400);
  CHECK(json::parse(bad.body)["error"]["field"] == "body");
  const auto wrong = svc.handle("POST", "/sessions/" + id + "/choices", "", R"({"task_id":3,"choices":"AAAAAAAAAA"})");
  CHECK(wrong.status == 409);
  CHECK(json::parse(wrong.body)["error"]["kind"] == "conflict");
  const auto invalid = svc.handle("POST", "/sessions/" + id + "/choices", "", R"({"task_id":1,"choices":"AAAAAAAAA"})");
  CHECK(invalid.status == 400);
  CHECK(json::parse(invalid.body)["error"]["field"] == "choices");
  CHECK(svc.handle("GET", "/sessions/" + id + "/scores", "", "").status == 409);

  const auto tasks = svc.handle("GET", "/tasks", "", "");
  CHECK(json::parse(tasks.body)["tasks"].size() == 5);
  const auto likert = json::parse(svc.handle("GET", "/likert", "", "").body);
  CHECK(likert["questions"].size() == 6);
  const auto exp = svc.handle("GET", "/export", "ids=" + id, "");
  CHECK(exp.status == 409);
  CHECK(svc.handle("GET", "/export", "", "").content_type == "text/csv");
}

TEST_CASE("HTTP endpoints over a real socket") {
  SessionStore store;
  const Service svc(store);
  httplib::Server server;
  register_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/sessions", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const std::string id = json::parse(res->body)["session_id"];
  for (int t = 1; t <= 5; ++t) {
    auto task = cli.Get("/sessions/" + id + "/task");
    REQUIRE(task);
    CHECK(json::parse(task->body)["task"]["id"] == t);
    auto r = cli.Post("/sessions/" + id + "/choices", json{{"task_id", t}, {"choices", "AAAAAAAAAA"}}.dump(),
                      "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
  }
  auto lk = cli.Post("/sessions/" + id + "/choices", kLikert.dump(), "application/json");
  REQUIRE(lk);
  CHECK(lk->status == 200);
  auto sc = cli.Get("/sessions/" + id + "/scores");
  REQUIRE(sc);
  CHECK(json::parse(sc->body)["mpl_avg_safe"] == 10.0);
  auto ex = cli.Get("/export?ids=" + id);
  REQUIRE(ex);
  CHECK(ex->status == 200);
  CHECK(ex->get_header_value("Content-Type").find("text/csv") == 0);
  auto missing = cli.Get("/sessions/nothing");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  worker.join();
}

TEST_CASE("CLI exit codes") {
  std::string out, err;
  CHECK(run_cli({"--help"}, &out) == 0);
  CHECK(run_cli({"no-such-command"}) == 2);
  CHECK(run_cli({"generate", "--rows", "-5"}) == 2);
  CHECK(run_cli({"train", "--data", "/definitely/missing.csv", "--family", "lasso"}) == 2);

  CHECK(run_cli({"generate", "--rows", "0"}, &out) == 0);
  std::istringstream in(out);
  CHECK(read_csv(in).rows() == 0);
}

TEST_CASE("CLI score-mpl") {
  TempDir dir;
  const auto f = dir.path / "sheets.txt";
  {
    std::ofstream o(f);
    o << "# all risky\n";
    for (int t = 1; t <= 5; ++t) o << t << " BBBBBBBBBB\n";
  }
  std::string out;
  CHECK(run_cli({"score-mpl", f.string()}, &out) == 0);
  CHECK(out == "0.0\n");
  {
    std::ofstream o(f);
    o << R"({"sheets":[{"task_id":1,"choices":"AAAAABBBBB"},{"task_id":2,"choices":"AAAAABBBBB"},)"
      << R"({"task_id":3,"choices":"AAAAABBBBB"},{"task_id":4,"choices":"AAAAABBBBB"},)"
      << R"({"task_id":5,"choices":"AAAAABBBBB"}]})";
  }
  CHECK(run_cli({"score-mpl", f.string()}, &out) == 0);
  CHECK(out == "5.0\n");
  {
    std::ofstream o(f);
    o << "1 AAAA\n";
  }
  std::string err;
  CHECK(run_cli({"score-mpl", f.string()}, &out, &err) == 2);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("CLI pipeline commands are deterministic") {
  TempDir dir;
  const auto data = (dir.path / "data.csv").string();
  REQUIRE(run_cli({"generate", "--rows", "150", "--seed", "3", "--out", data}) == 0);

  std::string a, b;
  REQUIRE(run_cli({"train", "--data", data, "--family", "ridge", "--param", "alpha=1", "--impute-rounds", "1"}, &a) ==
          0);
  CHECK(json::parse(a)["test"].contains("mape"));

  const auto lb = [&](const std::string& sub) {
    const auto out = dir.path / sub;
    std::string text;
    REQUIRE(run_cli({"leaderboard", "--data", data, "--out-dir", out.string(), "--folds", "4", "--impute-rounds",
                     "1", "--families", "lasso", "ridge"},
                    &text) == 0);
    return out;
  };
  const auto one = lb("one");
  const auto two = lb("two");
  for (const char* f : {"leaderboard.csv", "leaderboard.txt", "leaderboard.json", "fold_distribution.csv", "lasso_importance.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(one / f));
    CHECK(slurp(one / f) == slurp(two / f));
  }
  CHECK(slurp(one / "leaderboard.txt").find("Dummy") != std::string::npos);
}
