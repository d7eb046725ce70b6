#include <algorithm>
#include <set>

#include "riskpref/elicitation.hpp"
#include "riskpref/error.hpp"

namespace riskpref::elicitation {

MoneyAmount MoneyAmount::from_cents(std::int64_t cents) {
  if (cents < 0) throw ValidationError("money amount must be non-negative", "cents");
  return MoneyAmount(cents);
}

Lottery::Lottery(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty() || outcomes_.size() > 2) {
    throw ValidationError("a lottery has one or two outcomes", "outcomes");
  }
  Rational total = 0;
  for (const auto& o : outcomes_) {
    if (o.probability < Rational(0) || o.probability > Rational(1)) {
      throw ValidationError("probability outside [0,1]", "outcomes.probability");
    }
    total += o.probability;
  }
  if (total != Rational(1)) throw ValidationError("probabilities must sum to exactly 1", "outcomes");
}

Lottery Lottery::certain(MoneyAmount amount) { return Lottery({Outcome{Rational(1), amount}}); }

MoneyAmount Lottery::worst() const {
  std::optional<MoneyAmount> out;
  for (const auto& o : outcomes_) {
    if (o.probability > Rational(0) && (!out || o.payoff < *out)) out = o.payoff;
  }
  return *out;
}

MoneyAmount Lottery::best() const {
  std::optional<MoneyAmount> out;
  for (const auto& o : outcomes_) {
    if (o.probability > Rational(0) && (!out || o.payoff > *out)) out = o.payoff;
  }
  return *out;
}

Rational Lottery::prob_at_least(MoneyAmount threshold) const {
  Rational p = 0;
  for (const auto& o : outcomes_) {
    if (o.payoff >= threshold) p += o.probability;
  }
  return p;
}

Rational expected_value(const Lottery& lottery) {
  Rational ev = 0;
  for (const auto& o : lottery.outcomes()) ev += o.probability * o.payoff.euros();
  return ev;
}

bool strictly_dominates(const Lottery& dominant, const Lottery& other) {
  // Survival functions are step functions; comparing at every support point suffices.
  std::set<MoneyAmount> support;
  for (const auto& o : dominant.outcomes()) support.insert(o.payoff);
  for (const auto& o : other.outcomes()) support.insert(o.payoff);
  bool strict = false;
  for (const auto t : support) {
    const Rational pd = dominant.prob_at_least(t);
    const Rational po = other.prob_at_least(t);
    if (pd < po) return false;
    if (pd > po) strict = true;
  }
  return strict;
}

}  // namespace riskpref::elicitation
