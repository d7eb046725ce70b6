#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "riskpref/elicitation.hpp"
#include "riskpref/error.hpp"

using namespace riskpref;
using namespace riskpref::elicitation;

namespace {

Lottery two(int num, int den, int first_eur, int second_eur) {
  return Lottery({{Rational(num, den), MoneyAmount::from_euros(first_eur)},
                  {Rational(den - num, den), MoneyAmount::from_euros(second_eur)}});
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("money and lottery invariants") {
  CHECK_THROWS_AS(MoneyAmount::from_cents(-1), ValidationError);
  CHECK(MoneyAmount::from_euros(3).cents() == 300);
  CHECK_THROWS_AS(Lottery({}), ValidationError);
  CHECK_THROWS_AS(Lottery({{Rational(1, 2), MoneyAmount::from_euros(1)}}), ValidationError);
  CHECK_THROWS_AS(Lottery({{Rational(3, 2), MoneyAmount::from_euros(1)}, {Rational(-1, 2), MoneyAmount{}}}),
                  ValidationError);
  const auto c = Lottery::certain(MoneyAmount::from_euros(5));
  CHECK(expected_value(c) == Rational(5));
  CHECK(c.worst() == c.best());
}

TEST_CASE("expected value and dominance") {
  const auto l = two(1, 10, 80, 64);
  CHECK(expected_value(l) == Rational(656, 10));
  CHECK(l.worst() == MoneyAmount::from_euros(64));
  CHECK(l.best() == MoneyAmount::from_euros(80));
  CHECK(l.prob_at_least(MoneyAmount::from_euros(70)) == Rational(1, 10));
  CHECK(strictly_dominates(Lottery::certain(MoneyAmount::from_euros(154)), Lottery::certain(MoneyAmount::from_euros(80))));
  CHECK_FALSE(strictly_dominates(l, l));
  CHECK_FALSE(strictly_dominates(two(1, 2, 30, 130), Lottery::certain(MoneyAmount::from_euros(52))));
}

TEST_CASE("built-in lists") {
  const auto& tasks = builtin_tasks();
  REQUIRE(tasks.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(tasks[i].id == i + 1);
  CHECK(tasks[0].rows[0].option_a == two(1, 10, 80, 64));
  CHECK(tasks[0].rows[0].option_b == two(1, 10, 154, 4));
  CHECK(expected_value(tasks[2].rows[0].option_a) == Rational(52));
  CHECK(tasks[3].rows[0].option_b.outcomes()[0].probability == Rational(33, 100));
  CHECK(&find_task(4) == &tasks[3]);
  try {
    find_task(6);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "task_id");
  }
}

TEST_CASE("task definitions match the golden document") {
  const auto golden = nlohmann::json::parse(read_file(RISKPREF_GOLDEN_DIR "/tasks.json"));
  CHECK(tasks_to_json(builtin_tasks()) == golden);
  CHECK(tasks_to_json(builtin_tasks()).dump(2) + "\n" == read_file(RISKPREF_GOLDEN_DIR "/tasks.json"));
}

TEST_CASE("choice sheet parsing") {
  const auto s = ChoiceSheet::parse(1, "aaaabbbbbb");
  CHECK(s.to_string() == "AAAABBBBBB");
  CHECK(count_safe(s) == 4);
  try {
    ChoiceSheet::parse(1, "AAAAXBBBBB");
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "choices[4]");
  }
  try {
    ChoiceSheet::parse(1, "AAAA");
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "choices");
  }
  CHECK_THROWS_AS(count_safe(ChoiceSheet::parse(9, "AAAAAAAAAA")), ValidationError);
}

TEST_CASE("avg_safe needs one sheet per task") {
  std::vector<ChoiceSheet> sheets;
  for (int t = 1; t <= 5; ++t) sheets.push_back(ChoiceSheet::parse(t, std::string(t + 2, 'A') + std::string(8 - t, 'B')));
  CHECK(avg_safe(sheets) == doctest::Approx(5.0));
  std::reverse(sheets.begin(), sheets.end());
  CHECK(avg_safe(sheets) == doctest::Approx(5.0));
  sheets[0] = sheets[1];
  CHECK_THROWS_AS(avg_safe(sheets), ValidationError);
  sheets.pop_back();
  CHECK_THROWS_AS(avg_safe(sheets), ValidationError);
}

TEST_CASE("consistency report") {
  const auto single = consistency(ChoiceSheet::parse(2, "AAAABBBBBB"));
  CHECK(single.switch_count == 1);
  CHECK_FALSE(single.multiple_switch);
  CHECK(single.dominated_choices.empty());

  const auto multi = consistency(ChoiceSheet::parse(2, "ABABBBBBBB"));
  CHECK(multi.switch_count == 3);
  CHECK(multi.multiple_switch);

  // Last row of list 1: a sure 80 against a sure 154.
  const auto all_a = consistency(ChoiceSheet::parse(1, "AAAAAAAAAA"));
  CHECK(all_a.dominated_choices == std::vector<int>{9});
  CHECK(consistency(ChoiceSheet::parse(1, "BBBBBBBBBB")).dominated_choices.empty());
}

TEST_CASE("Likert battery") {
  const auto& b = likert_battery();
  REQUIRE(b.questions.size() == 6);
  CHECK_FALSE(b.questions[1].answerable);
  int na = 0;
  for (const auto& q : b.questions) na += q.allows_not_applicable ? 1 : 0;
  CHECK(na == 1);
  CHECK(likert_key(LikertDomain::health) == "health");

  std::map<std::string, std::optional<int>> a{
      {"general", 7}, {"occupation", 3}, {"health", std::nullopt}, {"personal_finances", 0}, {"job_finances", 10}};
  const auto r = record_likert(a);
  CHECK(r.risk_grq == 7);
  CHECK_FALSE(r.answers.health.has_value());
  CHECK(r.answers.job_finances == 10);

  auto bad = a;
  bad["general"] = 11;
  CHECK_THROWS_WITH_AS(record_likert(bad), doctest::Contains("outside"), ValidationError);
  bad = a;
  bad["occupation"] = std::nullopt;
  try {
    record_likert(bad);
    FAIL("expected throw");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "likert.occupation");
  }
  bad = a;
  bad.erase("job_finances");
  CHECK_THROWS_AS(record_likert(bad), ValidationError);
  bad = a;
  bad["domain_preamble"] = 3;
  CHECK_THROWS_AS(record_likert(bad), ValidationError);
}
