#pragma once

#include <vector>

#include "hamdec/rational.hpp"

namespace hamdec {

enum class Tail { Upper, Lower };

// One deviation event phi_i = sum of X_j over the support, to be avoided:
// Upper means the output must satisfy phi_i < (1+beta)*E[phi_i], Lower means
// phi_i > (1-beta)*E[phi_i].
struct DeviationEvent {
  std::vector<int> support;  // indices j with w_ij = 1, sorted
  Tail direction = Tail::Upper;
  Rational beta;  // in (0,1)
};

struct DerandomInstance {
  int variable_count = 0;
  Rational p;  // P(X_j = 1), shared across variables
  std::vector<DeviationEvent> events;

  // sum_i exp(-beta_i^2 * E[phi_i] / 3), the Theorem-level feasibility score.
  double feasibility_score() const;
  // score <= 1/2, with a 2^-20 slack factor absorbing rounding.
  bool feasible() const;
  void validate() const;
};

// exp(-a^2 * mean / 3); same closed form for both tails.
double chernoff_bound(const Rational& mean, const Rational& a, Tail tail);

// Deterministic conditional-probabilities walk. The returned assignment is
// re-verified against every event before returning; a verification failure
// indicates an estimator bug and throws.
std::vector<int> derandomize(const DerandomInstance& inst);

// Exact check of a single event against an assignment.
bool event_satisfied(const DerandomInstance& inst, const DeviationEvent& ev,
                     const std::vector<int>& x);

}  // namespace hamdec
