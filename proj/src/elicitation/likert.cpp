#include <string>

#include "riskpref/elicitation.hpp"
#include "riskpref/error.hpp"

namespace riskpref::elicitation {

const LikertBattery& likert_battery() {
  static const LikertBattery battery{
      "not at all willing to take risks",
      "very willing to take risks",
      {
          {"general",
           "Can you tell me to what extent you are, in general, willing or unwilling are to take risks?",
           true, false},
          {"domain_preamble",
           "People can behave differently in different situations. How do you assess your "
           "willingness to take risks in the following matters:",
           false, false},
          {"occupation", "... in your career choice?", true, false},
          {"health", "... in your health?", true, true},
          {"personal_finances", "... in your personal financial affairs?", true, false},
          {"job_finances", "... in your work-related financial matters?", true, false},
      }};
  return battery;
}

std::string_view likert_key(LikertDomain domain) noexcept {
  switch (domain) {
    case LikertDomain::general:
      return "general";
    case LikertDomain::occupation:
      return "occupation";
    case LikertDomain::health:
      return "health";
    case LikertDomain::personal_finances:
      return "personal_finances";
    case LikertDomain::job_finances:
      return "job_finances";
  }
  return "";
}

LikertRecord record_likert(const std::map<std::string, std::optional<int>>& answers) {
  const auto& battery = likert_battery();
  for (const auto& [key, value] : answers) {
    bool known = false;
    for (const auto& q : battery.questions) known = known || (q.answerable && q.key == key);
    if (!known) throw ValidationError("unknown Likert question", "likert." + key);
  }

  std::map<std::string, std::optional<int>> checked;
  for (const auto& q : battery.questions) {
    if (!q.answerable) continue;
    const std::string field = "likert." + q.key;
    const auto it = answers.find(q.key);
    if (it == answers.end()) throw ValidationError("missing answer for '" + q.key + "'", field);
    if (!it->second) {
      if (!q.allows_not_applicable) {
        throw ValidationError("'" + q.key + "' does not allow \"not applicable\"", field);
      }
    } else if (*it->second < kLikertMin || *it->second > kLikertMax) {
      throw ValidationError("'" + q.key + "' answer " + std::to_string(*it->second) + " outside 0..10",
                            field);
    }
    checked[q.key] = it->second;
  }

  LikertRecord record;
  record.answers.general = *checked["general"];
  record.answers.occupation = *checked["occupation"];
  record.answers.health = checked["health"];
  record.answers.personal_finances = *checked["personal_finances"];
  record.answers.job_finances = *checked["job_finances"];
  record.risk_grq = record.answers.general;
  return record;
}

}  // namespace riskpref::elicitation
