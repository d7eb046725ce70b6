#pragma once

// Live elicitation sessions (state machine + JSON-lines persistence), the
// HTTP/JSON service over them, and the command-line entry point.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "riskpref/elicitation.hpp"
#include "riskpref/synthdata.hpp"

namespace httplib {
class Server;
}

namespace riskpref::interface {

enum class SessionStatus { in_progress, complete };
std::string_view to_string(SessionStatus s) noexcept;

// Steps are served in a fixed order: MPL 1..5, then the Likert battery.
inline constexpr int kSessionSteps = elicitation::kTaskCount + 1;

struct SessionState {
  std::string id;
  std::int64_t created_at = 0;  // unix seconds
  std::vector<elicitation::ChoiceSheet> sheets;
  std::optional<elicitation::LikertRecord> likert;

  SessionStatus status() const noexcept;
  int completed_steps() const noexcept;
  // Task id 1..5 of the pending MPL, or nullopt once all lists are answered.
  std::optional<int> pending_task() const noexcept;
};

// Task payload: money as integer cents, probabilities as {num, den}.
nlohmann::json task_payload(const SessionState& s);
nlohmann::json progress_json(const SessionState& s);
// Throws ConflictError("session incomplete") unless complete.
elicitation::RiskMeasures session_scores(const SessionState& s);
nlohmann::json scores_json(const SessionState& s);

// Applies one submission to a state. MPL payload {"task_id": n, "choices":
// "AABB..." or ["A", ...]}; Likert payload {"likert": {"general": 5, ...,
// "health": null}}. Throws ValidationError (with a field path) for malformed
// payloads and ConflictError for out-of-order, duplicate or post-completion
// submissions. Returns the consistency report for MPL submissions.
std::optional<elicitation::ConsistencyReport> apply_submission(SessionState& s, const nlohmann::json& payload);

// Export rows as a DataTable (id, Likert domain answers and per-task
// consistency flags as feature columns; mpl_avg_safe and risk_grq targets).
DataTable export_table(std::span<const SessionState> sessions);

class SessionStore {
 public:
  using Clock = std::function<std::int64_t()>;

  // With a log directory, every event is appended to <dir>/<id>.jsonl and
  // existing logs are replayed on construction.
  explicit SessionStore(std::optional<std::filesystem::path> log_dir = std::nullopt, std::uint64_t seed = 0,
                        Clock clock = {});

  std::string create();
  SessionState snapshot(const std::string& id) const;  // NotFoundError for unknown ids
  nlohmann::json next_task(const std::string& id) const;
  nlohmann::json submit(const std::string& id, const nlohmann::json& payload);
  nlohmann::json scores(const std::string& id) const;
  // Empty ids: every complete session, in id order. Throws NotFoundError /
  // ConflictError for unknown or incomplete sessions.
  std::string export_csv(std::span<const std::string> ids) const;
  std::vector<std::string> ids() const;

 private:
  struct Entry {
    mutable std::mutex mutex;
    SessionState state;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void append_event(const std::string& id, const nlohmann::json& event) const;
  void replay(const std::filesystem::path& file);

  std::optional<std::filesystem::path> log_dir_;
  std::uint64_t seed_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent router for the HTTP contract:
//   POST /sessions                 -> 201 {"id", "status", ...}
//   GET  /sessions/{id}            -> progress
//   GET  /sessions/{id}/task       -> next task payload
//   POST /sessions/{id}/choices    -> progress (MPL sheet or Likert answers)
//   GET  /sessions/{id}/scores     -> {"mpl_avg_safe", "risk_grq", ...}
//   GET  /export[?ids=a,b]         -> text/csv
//   GET  /tasks, GET /likert       -> built-in definitions
// Errors: 400 validation, 404 not found, 409 conflict, 500 internal, each
// with {"error": {"kind", "message", "field"?}}.
class Service {
 public:
  explicit Service(SessionStore& store) : store_(store) {}
  Response handle(std::string_view method, std::string_view path, std::string_view query,
                  std::string_view body) const;

 private:
  SessionStore& store_;
};

void register_routes(httplib::Server& server, const Service& service);
// Blocks until the server stops. Throws Error if the address cannot be bound.
void serve(const std::string& host, int port, SessionStore& store);

// Entry point for the riskpref command-line tool. Returns 0 on success, 2 on
// validation or usage errors, 1 on internal errors.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskpref::interface
