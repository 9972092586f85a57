#pragma once

#include <optional>
#include <vector>

#include "hamdec/graph.hpp"
#include "hamdec/rational.hpp"

namespace hamdec {

struct ExpanderParams {
  Rational nu;
  Rational tau;
  std::optional<Rational> alpha;  // for semidegree claims, when relevant
  Rational eta{0};

  void validate() const;  // 0 < nu <= tau < 1
};

// { v : |N^-(v) ∩ S| >= nu*n }, multiplicities counted once per inneighbour.
std::vector<Vertex> robust_out_neighbourhood(const Multidigraph& G, const std::vector<Vertex>& S,
                                             const Rational& nu);

enum class ExpanderMode { Exhaustive, Sampled };

struct ExpanderVerdict {
  enum class Kind { Holds, Counterexample, NoViolationFound } kind;
  std::vector<Vertex> witness;  // violating S when kind == Counterexample
  long long subsets_checked = 0;

  bool holds() const { return kind == Kind::Holds; }
};

// Exhaustive mode checks every S with tau*n <= |S| <= (1-tau)*n (subsets
// enumerated in increasing (size, bitmask) order; first violator returned).
// Sampled mode is a falsifier only: it can never report Holds.
ExpanderVerdict is_robust_outexpander(const Multidigraph& G, const ExpanderParams& params,
                                      ExpanderMode mode, int samples = 0, uint64_t seed = 0,
                                      int exhaustive_cap = 22);

}  // namespace hamdec
