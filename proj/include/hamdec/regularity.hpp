#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamdec/graph.hpp"
#include "hamdec/rational.hpp"

namespace hamdec {

struct RegularityParams {
  Rational eps;
  Rational d;
  Rational beta;
  Rational gamma;
  Rational xi;
  Rational beta1;  // (1-5*gamma)*beta
  Rational beta2;  // (1-gamma^2)*beta1

  static RegularityParams derive(const Rational& eps, const Rational& d, const Rational& beta,
                                 const Rational& gamma, const Rational& xi);
  void validate() const;
};

Rational density(const BipartitePair& pair);  // exact e/(|A||B|)

enum class CheckMode { Exhaustive, Sampled };

struct RegularityVerdict {
  enum class Kind {
    Pass,
    ViolatingSubpair,    // |d(A,B)-d(X,Y)| > eps witnessed by (X, Y)
    DensityViolation,    // d(A,B) outside d +- eps
    DegreeViolation,     // some vertex degree outside (d +- eps) * opposite class
    NoViolationFound
  } kind = Kind::Pass;
  std::vector<int> X, Y;
  int vertex = -1;
  bool on_left = true;
  long long pairs_checked = 0;

  bool pass() const { return kind == Kind::Pass; }
};

// eps-regularity: every X in A, Y in B with |X| >= eps|A|, |Y| >= eps|B| has
// |d(A,B) - d(X,Y)| <= eps. Exhaustive mode requires |A|+|B| <= cap.
RegularityVerdict check_regular(const BipartitePair& pair, const Rational& eps, CheckMode mode,
                                int samples = 0, uint64_t seed = 0, int exhaustive_cap = 24);

// (eps,d)-superregularity: eps-regular, density within d +- eps, and every
// vertex degree within (d +- eps) times the opposite class size.
RegularityVerdict check_superregular(const BipartitePair& pair, const Rational& eps,
                                     const Rational& d, CheckMode mode, int samples = 0,
                                     uint64_t seed = 0, int exhaustive_cap = 24);

enum class SliceMode { Seeded, Balanced };

// Edge-disjoint spanning slices of P with slice k carrying a gamma_k/d share.
// Seeded: independent per-edge assignment; Balanced: matching-decomposition
// based shares with exactly regular slices on near-regular input. Both modes
// post-check the degree window (gamma_k +- eps^(1/12)) * m for vertices whose
// P-degree lies in (d +- eps) * m, retrying up to `retries` fresh seeds.
std::vector<BipartitePair> slice_pair(const BipartitePair& pair,
                                      const std::vector<Rational>& gammas, const Rational& d,
                                      uint64_t seed, const Rational& eps,
                                      SliceMode mode = SliceMode::Seeded, int retries = 16);

struct TrimResult {
  std::vector<std::vector<int>> kept;  // per cluster, surviving original indices
  std::vector<BipartitePair> pairs;    // reindexed onto the kept vertices
};

// Lemma-3.9-style trimming of a cyclically arranged list of pairs (pair j
// goes from cluster j to cluster j+1). Removes exactly floor(2*eps*m)
// vertices per cluster, including every vertex whose in/out degree deviates
// from gamma*m by more than 2*eps*m; errors when the deviants alone exceed
// the removal budget.
TrimResult trim_to_superregular(const std::vector<BipartitePair>& cycle_pairs, const Rational& eps,
                                const Rational& gamma);

// Lemma-3.10-style extraction: union of at most floor(d0*m) matchings, so
// max degree <= d0*m; errors when the average degree floor d0*m/8 is not met.
BipartitePair bounded_degree_subgraph(const BipartitePair& pair, const Rational& d0);

}  // namespace hamdec
