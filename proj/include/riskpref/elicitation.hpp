#pragma once

// Multiple-price-list (MPL) lottery tasks, the Likert risk battery, and the
// scoring rules that turn a participant's answers into risk measures.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "json.hpp"

namespace riskpref::elicitation {

using Rational = boost::rational<std::int64_t>;

inline constexpr int kRowsPerTask = 10;
inline constexpr int kTaskCount = 5;
inline constexpr int kLikertMin = 0;
inline constexpr int kLikertMax = 10;

// Non-negative amount in euro-cents.
class MoneyAmount {
 public:
  constexpr MoneyAmount() = default;
  // Throws ValidationError for negative amounts.
  static MoneyAmount from_cents(std::int64_t cents);
  static MoneyAmount from_euros(std::int64_t euros) { return from_cents(euros * 100); }

  constexpr std::int64_t cents() const noexcept { return cents_; }
  Rational euros() const { return Rational(cents_, 100); }

  friend constexpr auto operator<=>(const MoneyAmount&, const MoneyAmount&) = default;

 private:
  constexpr explicit MoneyAmount(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

struct Outcome {
  Rational probability;
  MoneyAmount payoff;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// One or two outcomes whose probabilities are exact rationals summing to 1.
// Zero-probability outcomes are kept when the source table prints them.
class Lottery {
 public:
  // Throws ValidationError unless 1..2 outcomes, each probability in [0,1], sum == 1.
  explicit Lottery(std::vector<Outcome> outcomes);
  static Lottery certain(MoneyAmount amount);

  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  // Lowest / highest payoff among outcomes with positive probability.
  MoneyAmount worst() const;
  MoneyAmount best() const;
  // P(payoff >= threshold).
  Rational prob_at_least(MoneyAmount threshold) const;

  friend bool operator==(const Lottery&, const Lottery&) = default;

 private:
  std::vector<Outcome> outcomes_;
};

// Exact expected payoff in euros.
Rational expected_value(const Lottery& lottery);

// True if `dominant` first-order stochastically dominates `other` with at
// least one strict inequality.
bool strictly_dominates(const Lottery& dominant, const Lottery& other);

struct MplRow {
  Lottery option_a;  // the safe option in every built-in list
  Lottery option_b;
};

struct MplTask {
  int id = 0;
  std::array<MplRow, kRowsPerTask> rows;
};

// The five built-in lists, ids 1..5.
const std::vector<MplTask>& builtin_tasks();
// Throws ValidationError (field "task_id") for ids that are not registered.
const MplTask& find_task(int task_id);

// Canonical document: {"tasks":[{"id":..,"rows":[{"option_a":[{"cents","prob_den","prob_num"}],
// "option_b":[...]}]}]}. Keys are sorted so the dump is byte-stable.
nlohmann::json tasks_to_json(std::span<const MplTask> tasks);

enum class Choice : char { A = 'A', B = 'B' };

struct ChoiceSheet {
  int task_id = 0;
  std::array<Choice, kRowsPerTask> choices{};

  // Accepts exactly ten 'A'/'B' characters (case-insensitive).
  static ChoiceSheet parse(int task_id, std::string_view choices);
  std::string to_string() const;
  friend bool operator==(const ChoiceSheet&, const ChoiceSheet&) = default;
};

struct ConsistencyReport {
  int switch_count = 0;
  bool multiple_switch = false;
  std::vector<int> dominated_choices;  // 0-based row indices
};

int count_safe(const ChoiceSheet& sheet);
// Mean of count_safe over exactly one sheet per built-in task, in any order.
double avg_safe(std::span<const ChoiceSheet> sheets);
ConsistencyReport consistency(const ChoiceSheet& sheet);

// --- Likert battery ------------------------------------------------------

enum class LikertDomain { general, occupation, health, personal_finances, job_finances };

struct LikertQuestion {
  std::string key;
  std::string text;
  bool answerable = true;             // false for the domain-specific preamble
  bool allows_not_applicable = false;  // health only
};

struct LikertBattery {
  std::string scale_low;
  std::string scale_high;
  std::vector<LikertQuestion> questions;  // six entries, table order
};

struct LikertAnswers {
  int general = 0;
  int occupation = 0;
  std::optional<int> health;  // nullopt = "not applicable"
  int personal_finances = 0;
  int job_finances = 0;
  friend bool operator==(const LikertAnswers&, const LikertAnswers&) = default;
};

struct LikertRecord {
  int risk_grq = 0;
  LikertAnswers answers;
};

const LikertBattery& likert_battery();
std::string_view likert_key(LikertDomain domain) noexcept;

// Keys are the question keys of the battery; a nullopt value is "not
// applicable". Throws ValidationError naming the question on a missing key,
// an unknown key, an out-of-range value, or NA where it is not allowed.
LikertRecord record_likert(const std::map<std::string, std::optional<int>>& answers);

struct RiskMeasures {
  double mpl_avg_safe = 0.0;
  std::optional<int> risk_grq;
};

}  // namespace riskpref::elicitation
