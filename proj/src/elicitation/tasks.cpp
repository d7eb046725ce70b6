#include <string>

#include "riskpref/elicitation.hpp"
#include "riskpref/error.hpp"

namespace riskpref::elicitation {

namespace {

// One list row. Probabilities are in hundredths; the second outcome
// of each option takes the complementary probability. kNone marks a
// single-outcome (certain) option.
constexpr int kNone = -1;

struct RowLiteral {
  int a_prob, a_first, a_second;
  int b_prob, b_first, b_second;
};

using TaskLiteral = std::array<RowLiteral, kRowsPerTask>;

// Multiple price list variation 1
constexpr TaskLiteral kMpl1{{
    {10, 80, 64, 10, 154, 4},
    {20, 80, 64, 20, 154, 4},
    {30, 80, 64, 30, 154, 4},
    {40, 80, 64, 40, 154, 4},
    {50, 80, 64, 50, 154, 4},
    {60, 80, 64, 60, 154, 4},
    {70, 80, 64, 70, 154, 4},
    {80, 80, 64, 80, 154, 4},
    {90, 80, 64, 90, 154, 4},
    {100, 80, 64, 100, 154, 4},
}};

// Multiple price list variation 2
constexpr TaskLiteral kMpl2{{
    {10, 99, 41, 10, 134, 19},
    {20, 99, 41, 20, 134, 19},
    {30, 99, 41, 30, 134, 19},
    {40, 99, 41, 40, 134, 19},
    {50, 99, 41, 50, 134, 19},
    {60, 99, 41, 60, 134, 19},
    {70, 99, 41, 70, 134, 19},
    {80, 99, 41, 80, 134, 19},
    {90, 99, 41, 90, 134, 19},
    {100, 99, 41, 100, 134, 19},
}};

// Multiple price list variation 3
constexpr TaskLiteral kMpl3{{
    {100, 52, kNone, 50, 30, 130},
    {100, 57, kNone, 50, 30, 130},
    {100, 63, kNone, 50, 30, 130},
    {100, 68, kNone, 50, 30, 130},
    {100, 73, kNone, 50, 30, 130},
    {100, 78, kNone, 50, 30, 130},
    {100, 82, kNone, 50, 30, 130},
    {100, 88, kNone, 50, 30, 130},
    {100, 94, kNone, 50, 30, 130},
    {100, 101, kNone, 50, 30, 130},
}};

// Multiple price list variation 4
constexpr TaskLiteral kMpl4{{
    {100, 39, kNone, 33, 20, 110},
    {100, 46, kNone, 33, 20, 110},
    {100, 56, kNone, 33, 20, 110},
    {100, 64, kNone, 33, 20, 110},
    {100, 70, kNone, 33, 20, 110},
    {100, 75, kNone, 33, 20, 110},
    {100, 79, kNone, 33, 20, 110},
    {100, 84, kNone, 33, 20, 110},
    {100, 88, kNone, 33, 20, 110},
    {100, 93, kNone, 33, 20, 110},
}};

// Multiple price list variation 5
constexpr TaskLiteral kMpl5{{
    {50, 90, 70, 50, 103, 35},
    {50, 90, 70, 50, 109, 35},
    {50, 90, 70, 50, 115, 35},
    {50, 90, 70, 50, 122, 35},
    {50, 90, 70, 50, 128, 35},
    {50, 90, 70, 50, 131, 35},
    {50, 90, 70, 50, 138, 35},
    {50, 90, 70, 50, 153, 35},
    {50, 90, 70, 50, 170, 35},
    {50, 90, 70, 50, 186, 35},
}};

Lottery make_option(int prob_hundredths, int first_euros, int second_euros) {
  std::vector<Outcome> outcomes{
      {Rational(prob_hundredths, 100), MoneyAmount::from_euros(first_euros)}};
  if (second_euros != kNone) {
    outcomes.push_back({Rational(100 - prob_hundredths, 100), MoneyAmount::from_euros(second_euros)});
  }
  return Lottery(std::move(outcomes));
}

MplTask make_task(int id, const TaskLiteral& literal) {
  auto row = [&](std::size_t i) {
    const auto& r = literal[i];
    return MplRow{make_option(r.a_prob, r.a_first, r.a_second),
                  make_option(r.b_prob, r.b_first, r.b_second)};
  };
  return MplTask{id, {row(0), row(1), row(2), row(3), row(4), row(5), row(6), row(7), row(8), row(9)}};
}

nlohmann::json lottery_to_json(const Lottery& lottery) {
  auto out = nlohmann::json::array();
  for (const auto& o : lottery.outcomes()) {
    out.push_back({{"prob_num", o.probability.numerator()},
                   {"prob_den", o.probability.denominator()},
                   {"cents", o.payoff.cents()}});
  }
  return out;
}

}  // namespace

const std::vector<MplTask>& builtin_tasks() {
  static const std::vector<MplTask> tasks{
      make_task(1, kMpl1), make_task(2, kMpl2), make_task(3, kMpl3),
      make_task(4, kMpl4), make_task(5, kMpl5),
  };
  return tasks;
}

const MplTask& find_task(int task_id) {
  for (const auto& t : builtin_tasks()) {
    if (t.id == task_id) return t;
  }
  throw ValidationError("unregistered task id " + std::to_string(task_id), "task_id");
}

nlohmann::json tasks_to_json(std::span<const MplTask> tasks) {
  auto list = nlohmann::json::array();
  for (const auto& task : tasks) {
    auto rows = nlohmann::json::array();
    for (const auto& row : task.rows) {
      rows.push_back({{"option_a", lottery_to_json(row.option_a)},
                      {"option_b", lottery_to_json(row.option_b)}});
    }
    list.push_back({{"id", task.id}, {"rows", std::move(rows)}});
  }
  return {{"tasks", std::move(list)}};
}

}  // namespace riskpref::elicitation
