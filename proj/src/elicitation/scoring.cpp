#include <algorithm>
#include <cctype>
#include <string>

#include "riskpref/elicitation.hpp"
#include "riskpref/error.hpp"

namespace riskpref::elicitation {

ChoiceSheet ChoiceSheet::parse(int task_id, std::string_view choices) {
  if (choices.size() != kRowsPerTask) {
    throw ValidationError("a choice sheet has exactly 10 choices, got " + std::to_string(choices.size()),
                          "choices");
  }
  ChoiceSheet sheet{task_id, {}};
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(choices[i])));
    if (c != 'A' && c != 'B') {
      throw ValidationError("choice must be A or B", "choices[" + std::to_string(i) + "]");
    }
    sheet.choices[i] = static_cast<Choice>(c);
  }
  return sheet;
}

std::string ChoiceSheet::to_string() const {
  std::string out;
  for (const auto c : choices) out.push_back(static_cast<char>(c));
  return out;
}

int count_safe(const ChoiceSheet& sheet) {
  find_task(sheet.task_id);
  return static_cast<int>(std::count(sheet.choices.begin(), sheet.choices.end(), Choice::A));
}

double avg_safe(std::span<const ChoiceSheet> sheets) {
  if (sheets.size() != static_cast<std::size_t>(kTaskCount)) {
    throw ValidationError("need exactly one sheet per task (5), got " + std::to_string(sheets.size()),
                          "sheets");
  }
  std::array<bool, kTaskCount + 1> seen{};
  int total = 0;
  for (const auto& sheet : sheets) {
    find_task(sheet.task_id);
    if (seen[sheet.task_id]) {
      throw ValidationError("duplicate sheet for task " + std::to_string(sheet.task_id), "sheets");
    }
    seen[sheet.task_id] = true;
    total += count_safe(sheet);
  }
  return static_cast<double>(total) / kTaskCount;
}

ConsistencyReport consistency(const ChoiceSheet& sheet) {
  const MplTask& task = find_task(sheet.task_id);
  ConsistencyReport report;
  for (int i = 1; i < kRowsPerTask; ++i) {
    if (sheet.choices[i] != sheet.choices[i - 1]) ++report.switch_count;
  }
  report.multiple_switch = report.switch_count > 1;
  for (int i = 0; i < kRowsPerTask; ++i) {
    const MplRow& row = task.rows[i];
    const bool chose_a = sheet.choices[i] == Choice::A;
    const Lottery& chosen = chose_a ? row.option_a : row.option_b;
    const Lottery& other = chose_a ? row.option_b : row.option_a;
    if (chosen.worst() < other.best() && strictly_dominates(other, chosen)) {
      report.dominated_choices.push_back(i);
    }
  }
  return report;
}

}  // namespace riskpref::elicitation
