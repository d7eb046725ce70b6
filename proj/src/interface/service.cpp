#include <string>
#include <vector>

#include "riskpref/error.hpp"
#include "riskpref/interface.hpp"

namespace riskpref::interface {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response error_response(int status, std::string_view kind, const std::string& message, const std::string& field = {}) {
  json err = {{"kind", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  return json_response(status, {{"error", std::move(err)}});
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    parts.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out.push_back(' ');
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2])));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::vector<std::string> query_ids(std::string_view query) {
  std::vector<std::string> ids;
  std::size_t i = 0;
  while (i <= query.size()) {
    const auto amp = query.find('&', i);
    const auto pair = query.substr(i, amp == std::string_view::npos ? std::string_view::npos : amp - i);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == "ids") {
      const std::string value = url_decode(pair.substr(eq + 1));
      std::size_t k = 0;
      while (k <= value.size()) {
        const auto comma = value.find(',', k);
        const auto id = value.substr(k, comma == std::string::npos ? std::string::npos : comma - k);
        if (!id.empty()) ids.push_back(id);
        if (comma == std::string::npos) break;
        k = comma + 1;
      }
    }
    if (amp == std::string_view::npos) break;
    i = amp + 1;
  }
  return ids;
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON body: ") + e.what(), "body");
  }
}

}  // namespace

Response Service::handle(std::string_view method, std::string_view path, std::string_view query,
                         std::string_view body) const {
  const auto parts = split_path(path);
  try {
    if (parts.size() == 1 && parts[0] == "sessions" && method == "POST") {
      const auto id = store_.create();
      return json_response(201, progress_json(store_.snapshot(id)));
    }
    if (parts.size() == 2 && parts[0] == "sessions" && method == "GET") {
      return json_response(200, progress_json(store_.snapshot(parts[1])));
    }
    if (parts.size() == 3 && parts[0] == "sessions") {
      const auto& id = parts[1];
      const auto& leaf = parts[2];
      if (leaf == "task" && method == "GET") return json_response(200, store_.next_task(id));
      if (leaf == "choices" && method == "POST") {
        store_.snapshot(id);
        return json_response(200, store_.submit(id, parse_body(body)));
      }
      if (leaf == "scores" && method == "GET") return json_response(200, store_.scores(id));
    }
    if (parts.size() == 1 && parts[0] == "export" && method == "GET") {
      const auto ids = query_ids(query);
      return {200, "text/csv", store_.export_csv(ids)};
    }
    if (parts.size() == 1 && parts[0] == "tasks" && method == "GET") {
      return json_response(200, elicitation::tasks_to_json(elicitation::builtin_tasks()));
    }
    if (parts.size() == 1 && parts[0] == "likert" && method == "GET") {
      SessionState s;
      s.sheets.resize(elicitation::kTaskCount);
      json doc = task_payload(s);
      doc.erase("session_id");
      doc.erase("step");
      doc.erase("of");
      doc.erase("kind");
      return json_response(200, doc);
    }
    return error_response(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
  } catch (const ValidationError& e) {
    return error_response(400, "validation", e.what(), e.field());
  } catch (const NotFoundError& e) {
    return error_response(404, "not_found", e.what());
  } catch (const ConflictError& e) {
    return error_response(409, "conflict", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace riskpref::interface
