#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "riskpref/error.hpp"
#include "riskpref/interface.hpp"
#include "riskpref/random.hpp"

namespace riskpref::interface {

using nlohmann::json;
namespace el = elicitation;

std::string_view to_string(SessionStatus s) noexcept {
  return s == SessionStatus::complete ? "complete" : "in_progress";
}

SessionStatus SessionState::status() const noexcept {
  return sheets.size() == el::kTaskCount && likert ? SessionStatus::complete : SessionStatus::in_progress;
}

int SessionState::completed_steps() const noexcept {
  return static_cast<int>(sheets.size()) + (likert ? 1 : 0);
}

std::optional<int> SessionState::pending_task() const noexcept {
  if (sheets.size() >= el::kTaskCount) return std::nullopt;
  return el::builtin_tasks()[sheets.size()].id;
}

namespace {

json outcomes_json(const el::Lottery& lottery) {
  json out = json::array();
  for (const auto& o : lottery.outcomes()) {
    out.push_back({{"prob", {{"num", o.probability.numerator()}, {"den", o.probability.denominator()}}},
                   {"cents", o.payoff.cents()}});
  }
  return out;
}

json consistency_json(const el::ConsistencyReport& r) {
  return {{"switch_count", r.switch_count},
          {"multiple_switch", r.multiple_switch},
          {"dominated_choices", r.dominated_choices}};
}

std::string choices_from_array(const json& arr) {
  std::string out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& c = arr[i];
    const std::string field = "choices[" + std::to_string(i) + "]";
    if (!c.is_string() || c.get_ref<const std::string&>().size() != 1) {
      throw ValidationError("choice must be \"A\" or \"B\"", field);
    }
    const char ch = c.get_ref<const std::string&>()[0];
    if (ch != 'A' && ch != 'B' && ch != 'a' && ch != 'b') throw ValidationError("choice must be A or B", field);
    out.push_back(ch);
  }
  return out;
}

el::ChoiceSheet parse_sheet(const json& payload) {
  const auto tid = payload.find("task_id");
  if (tid == payload.end() || !tid->is_number_integer()) throw ValidationError("task_id must be an integer", "task_id");
  const int task_id = tid->get<int>();
  el::find_task(task_id);
  const auto ch = payload.find("choices");
  if (ch == payload.end()) throw ValidationError("missing choices", "choices");
  if (ch->is_string()) return el::ChoiceSheet::parse(task_id, ch->get_ref<const std::string&>());
  if (ch->is_array()) return el::ChoiceSheet::parse(task_id, choices_from_array(*ch));
  throw ValidationError("choices must be a string or an array", "choices");
}

el::LikertRecord parse_likert(const json& answers) {
  if (!answers.is_object()) throw ValidationError("likert must be an object", "likert");
  std::map<std::string, std::optional<int>> values;
  for (const auto& [key, v] : answers.items()) {
    if (v.is_null()) {
      values[key] = std::nullopt;
    } else if (v.is_number_integer()) {
      values[key] = v.get<int>();
    } else {
      throw ValidationError("answer must be an integer 0..10 or null", "likert." + key);
    }
  }
  return el::record_likert(values);
}

}  // namespace

json task_payload(const SessionState& s) {
  json out = {{"session_id", s.id}, {"of", kSessionSteps}};
  if (s.status() == SessionStatus::complete) {
    out["kind"] = "complete";
    out["step"] = nullptr;
    return out;
  }
  out["step"] = s.completed_steps() + 1;
  if (const auto tid = s.pending_task()) {
    const auto& task = el::find_task(*tid);
    json rows = json::array();
    for (std::size_t r = 0; r < task.rows.size(); ++r) {
      rows.push_back({{"row", r + 1},
                      {"option_a", outcomes_json(task.rows[r].option_a)},
                      {"option_b", outcomes_json(task.rows[r].option_b)}});
    }
    out["kind"] = "mpl";
    out["task"] = {{"id", task.id}, {"rows", std::move(rows)}};
    return out;
  }
  const auto& battery = el::likert_battery();
  json questions = json::array();
  for (const auto& q : battery.questions) {
    questions.push_back({{"key", q.key},
                         {"text", q.text},
                         {"answerable", q.answerable},
                         {"allows_not_applicable", q.allows_not_applicable}});
  }
  out["kind"] = "likert";
  out["scale"] = {{"min", el::kLikertMin}, {"max", el::kLikertMax}, {"low", battery.scale_low},
                  {"high", battery.scale_high}};
  out["questions"] = std::move(questions);
  return out;
}

json progress_json(const SessionState& s) {
  json out = {{"session_id", s.id},
              {"status", to_string(s.status())},
              {"created_at", s.created_at},
              {"completed_steps", s.completed_steps()},
              {"of", kSessionSteps}};
  if (s.status() == SessionStatus::complete) {
    out["next"] = nullptr;
  } else if (const auto tid = s.pending_task()) {
    out["next"] = {{"kind", "mpl"}, {"task_id", *tid}};
  } else {
    out["next"] = {{"kind", "likert"}};
  }
  return out;
}

el::RiskMeasures session_scores(const SessionState& s) {
  if (s.status() != SessionStatus::complete) throw ConflictError("session incomplete");
  return {el::avg_safe(s.sheets), s.likert->risk_grq};
}

json scores_json(const SessionState& s) {
  const auto m = session_scores(s);
  json per_task = json::array();
  for (const auto& sheet : s.sheets) {
    json row = consistency_json(el::consistency(sheet));
    row["task_id"] = sheet.task_id;
    row["safe_count"] = el::count_safe(sheet);
    per_task.push_back(std::move(row));
  }
  const auto& a = s.likert->answers;
  return {{"session_id", s.id},
          {"mpl_avg_safe", m.mpl_avg_safe},
          {"risk_grq", *m.risk_grq},
          {"likert",
           {{"general", a.general},
            {"occupation", a.occupation},
            {"health", a.health ? json(*a.health) : json(nullptr)},
            {"personal_finances", a.personal_finances},
            {"job_finances", a.job_finances}}},
          {"per_task", std::move(per_task)}};
}

std::optional<el::ConsistencyReport> apply_submission(SessionState& s, const json& payload) {
  if (!payload.is_object()) throw ValidationError("payload must be a JSON object");
  if (s.status() == SessionStatus::complete) throw ConflictError("session complete");

  if (payload.contains("likert")) {
    if (const auto tid = s.pending_task()) {
      throw ConflictError(fmt::format("out of order: MPL task {} is pending", *tid));
    }
    s.likert = parse_likert(payload["likert"]);
    return std::nullopt;
  }

  const auto pending = s.pending_task();
  el::ChoiceSheet sheet = parse_sheet(payload);
  for (const auto& done : s.sheets) {
    if (done.task_id == sheet.task_id) throw ConflictError(fmt::format("task {} already submitted", sheet.task_id));
  }
  if (!pending) throw ConflictError("out of order: the Likert battery is pending");
  if (sheet.task_id != *pending) {
    throw ConflictError(fmt::format("out of order: expected task {}, got {}", *pending, sheet.task_id));
  }
  auto report = el::consistency(sheet);
  s.sheets.push_back(sheet);
  return report;
}

DataTable export_table(std::span<const SessionState> sessions) {
  DataTable t(sessions.size());
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  auto column = [&](std::string name) {
    Column c;
    c.name = std::move(name);
    c.values.assign(sessions.size(), nan);
    c.missing.assign(sessions.size(), 1);
    return c;
  };
  auto set = [](Column& c, std::size_t r, double v) {
    c.values[r] = v;
    c.missing[r] = 0;
  };

  std::vector<Column> cols;
  for (const auto key : {"occupation", "health", "personal_finances", "job_finances"}) {
    cols.push_back(column(fmt::format("likert_{}", key)));
  }
  for (int task = 1; task <= el::kTaskCount; ++task) {
    cols.push_back(column(fmt::format("mpl{}_switch_count", task)));
    cols.push_back(column(fmt::format("mpl{}_multiple_switch", task)));
  }
  std::vector<double> avg(sessions.size());
  std::vector<double> grq(sessions.size());

  for (std::size_t r = 0; r < sessions.size(); ++r) {
    const auto& s = sessions[r];
    const auto m = session_scores(s);
    t.ids.push_back(s.id);
    avg[r] = m.mpl_avg_safe;
    grq[r] = *m.risk_grq;
    const auto& a = s.likert->answers;
    set(cols[0], r, a.occupation);
    if (a.health) set(cols[1], r, *a.health);
    set(cols[2], r, a.personal_finances);
    set(cols[3], r, a.job_finances);
    for (const auto& sheet : s.sheets) {
      const auto rep = el::consistency(sheet);
      const auto base = 4 + 2 * static_cast<std::size_t>(sheet.task_id - 1);
      set(cols[base], r, rep.switch_count);
      set(cols[base + 1], r, rep.multiple_switch ? 1.0 : 0.0);
    }
  }
  for (auto& c : cols) t.add_column(std::move(c));
  t.mpl_avg_safe = std::move(avg);
  t.risk_grq = std::move(grq);
  return t;
}

// --- store ----------------------------------------------------------------------

SessionStore::SessionStore(std::optional<std::filesystem::path> log_dir, std::uint64_t seed, Clock clock)
    : log_dir_(std::move(log_dir)), seed_(seed), clock_(std::move(clock)) {
  if (!clock_) {
    clock_ = [] {
      return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
  if (!log_dir_) return;
  std::filesystem::create_directories(*log_dir_);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(*log_dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) replay(f);
}

void SessionStore::replay(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open session log " + file.string());
  auto entry = std::make_shared<Entry>();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = fmt::format("{}:{}", file.string(), line_no);
    try {
      const json ev = json::parse(line);
      const auto& kind = ev.at("event").get_ref<const std::string&>();
      if (line_no == 1) {
        if (kind != "created") throw Error("log must start with a created event");
        entry->state.id = ev.at("id").get<std::string>();
        entry->state.created_at = ev.at("created_at").get<std::int64_t>();
        counter_ = std::max(counter_, ev.at("seq").get<std::uint64_t>() + 1);
      } else if (kind == "submission") {
        apply_submission(entry->state, ev.at("payload"));
      } else {
        throw Error("unexpected event '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  if (entry->state.id.empty()) throw Error("empty session log " + file.string());
  sessions_[entry->state.id] = entry;
}

void SessionStore::append_event(const std::string& id, const json& event) const {
  if (!log_dir_) return;
  std::ofstream out(*log_dir_ / (id + ".jsonl"), std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot write session log for " + id);
}

std::string SessionStore::create() {
  std::unique_lock lock(mutex_);
  std::string id;
  std::uint64_t seq = 0;
  do {
    seq = counter_++;
    id = fmt::format("{:016x}", substream_seed(seed_, streams::kSession, seq));
  } while (sessions_.contains(id));
  auto entry = std::make_shared<Entry>();
  entry->state.id = id;
  entry->state.created_at = clock_();
  append_event(id, {{"event", "created"}, {"id", id}, {"seq", seq}, {"created_at", entry->state.created_at}});
  sessions_[id] = entry;
  return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

SessionState SessionStore::snapshot(const std::string& id) const {
  const auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return entry->state;
}

json SessionStore::next_task(const std::string& id) const { return task_payload(snapshot(id)); }

json SessionStore::submit(const std::string& id, const json& payload) {
  const auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  SessionState next = entry->state;
  const auto report = apply_submission(next, payload);
  json stored;
  if (report) {
    stored = {{"task_id", next.sheets.back().task_id}, {"choices", next.sheets.back().to_string()}};
  } else {
    const auto& a = next.likert->answers;
    stored = {{"likert",
               {{"general", a.general},
                {"occupation", a.occupation},
                {"health", a.health ? json(*a.health) : json(nullptr)},
                {"personal_finances", a.personal_finances},
                {"job_finances", a.job_finances}}}};
  }
  append_event(id, {{"event", "submission"}, {"payload", stored}});
  entry->state = std::move(next);
  json out = progress_json(entry->state);
  if (report) out["consistency"] = consistency_json(*report);
  return out;
}

json SessionStore::scores(const std::string& id) const { return scores_json(snapshot(id)); }

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::string SessionStore::export_csv(std::span<const std::string> ids) const {
  std::vector<SessionState> rows;
  if (ids.empty()) {
    for (const auto& id : this->ids()) {
      auto s = snapshot(id);
      if (s.status() == SessionStatus::complete) rows.push_back(std::move(s));
    }
  } else {
    for (const auto& id : ids) {
      auto s = snapshot(id);
      if (s.status() != SessionStatus::complete) throw ConflictError("session incomplete: " + id);
      rows.push_back(std::move(s));
    }
  }
  return to_csv(export_table(rows));
}

}  // namespace riskpref::interface
