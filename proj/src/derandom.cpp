#include "hamdec/derandom.hpp"

#include <cmath>
#include <stdexcept>

namespace hamdec {

double chernoff_bound(const Rational& mean, const Rational& a, Tail) {
  if (!(Rational(0) < a && a < Rational(1)))
    throw std::invalid_argument("chernoff_bound: need 0 < a < 1");
  if (!(mean > Rational(0))) throw std::invalid_argument("chernoff_bound: need mean > 0");
  return std::exp(-a.to_double() * a.to_double() * mean.to_double() / 3.0);
}

double DerandomInstance::feasibility_score() const {
  double score = 0.0;
  for (const auto& ev : events) {
    double mu = p.to_double() * static_cast<double>(ev.support.size());
    double b = ev.beta.to_double();
    score += std::exp(-b * b * mu / 3.0);
  }
  return score;
}

bool DerandomInstance::feasible() const {
  return feasibility_score() <= 0.5 * (1.0 + std::ldexp(1.0, -20));
}

void DerandomInstance::validate() const {
  if (variable_count <= 0) throw std::invalid_argument("DerandomInstance: no variables");
  if (!(Rational(0) < p && p < Rational(1)))
    throw std::invalid_argument("DerandomInstance: need 0 < p < 1");
  for (const auto& ev : events) {
    if (ev.support.empty())
      throw std::invalid_argument("DerandomInstance: event with empty support");
    if (!(Rational(0) < ev.beta && ev.beta < Rational(1)))
      throw std::invalid_argument("DerandomInstance: beta out of (0,1)");
    for (int j : ev.support)
      if (j < 0 || j >= variable_count)
        throw std::invalid_argument("DerandomInstance: support index out of range");
  }
}

bool event_satisfied(const DerandomInstance& inst, const DeviationEvent& ev,
                     const std::vector<int>& x) {
  long long phi = 0;
  for (int j : ev.support) phi += x[j];
  // E[phi] = p * |support|, thresholds compared exactly in rationals
  Rational mu = inst.p * Rational(static_cast<long long>(ev.support.size()));
  if (ev.direction == Tail::Upper) return Rational(phi) < (Rational(1) + ev.beta) * mu;
  return Rational(phi) > (Rational(1) - ev.beta) * mu;
}

std::vector<int> derandomize(const DerandomInstance& inst) {
  inst.validate();
  const int N = inst.variable_count;
  if (inst.events.empty()) return std::vector<int>(N, 0);
  if (!inst.feasible())
    throw std::invalid_argument("derandomize: infeasible instance (score > 1/2)");

  const double p = inst.p.to_double();
  const int m = static_cast<int>(inst.events.size());

  // Raghavan-style estimator, t = ln(1+beta) / ln(1/(1-beta)); per-event
  // value maintained directly, with the multiplier each branch applies.
  std::vector<long double> value(m);      // current pessimistic estimate
  std::vector<long double> fac_one(m);    // multiplier when x_j := 1
  std::vector<long double> fac_zero(m);   // multiplier when x_j := 0
  std::vector<std::vector<int>> events_of_var(N);

  for (int i = 0; i < m; ++i) {
    const auto& ev = inst.events[i];
    double b = ev.beta.to_double();
    double mu = p * static_cast<double>(ev.support.size());
    if (ev.direction == Tail::Upper) {
      double t = std::log1p(b);
      long double base = 1.0L - p + p * std::exp(t);  // E[e^{tX}]
      value[i] = static_cast<long double>(ev.support.size()) * std::log(base) -
                 static_cast<long double>(t) * (1.0 + b) * mu;
      fac_one[i] = t - std::log(base);
      fac_zero[i] = -std::log(base);
    } else {
      double t = -std::log1p(-b);  // ln(1/(1-beta))
      long double base = 1.0L - p + p * std::exp(-t);  // E[e^{-tX}]
      value[i] = static_cast<long double>(ev.support.size()) * std::log(base) +
                 static_cast<long double>(t) * (1.0 - b) * mu;
      fac_one[i] = -t - std::log(base);
      fac_zero[i] = -std::log(base);
    }
    value[i] = std::exp(value[i]);
    fac_one[i] = std::exp(fac_one[i]);
    fac_zero[i] = std::exp(fac_zero[i]);
    for (int j : ev.support) events_of_var[j].push_back(i);
  }

  long double total = 0;
  for (int i = 0; i < m; ++i) total += value[i];

  std::vector<int> x(N, 0);
  for (int j = 0; j < N; ++j) {
    long double delta_one = 0, delta_zero = 0;
    for (int i : events_of_var[j]) {
      delta_one += value[i] * (fac_one[i] - 1.0L);
      delta_zero += value[i] * (fac_zero[i] - 1.0L);
    }
    // ties go to 0 so that unconstrained variables stay zero
    int choice = (total + delta_one < total + delta_zero) ? 1 : 0;
    x[j] = choice;
    long double new_total = total + (choice ? delta_one : delta_zero);
    if (new_total > total * (1.0L + 1e-9L) + 1e-12L)
      throw std::runtime_error("derandomize: estimator increased (internal bug)");
    total = new_total;
    for (int i : events_of_var[j]) value[i] *= (choice ? fac_one[i] : fac_zero[i]);
  }

  for (const auto& ev : inst.events)
    if (!event_satisfied(inst, ev, x))
      throw std::runtime_error("derandomize: output failed direct verification (estimator bug)");
  return x;
}

}  // namespace hamdec
