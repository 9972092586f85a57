#include "doctest.h"

#include <algorithm>

#include "hamdec/expander.hpp"
#include "hamdec/graph.hpp"
#include "hamdec/rng.hpp"

using namespace hamdec;

namespace {

Multidigraph complete_digraph(int n) {
  Multidigraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.add_edge(i, j);
  return g;
}

Multidigraph directed_cycle(int n) {
  Multidigraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

}  // namespace

TEST_CASE("robust outneighbourhood on K4") {
  // every vertex has >= 1 inneighbour in S = {0,1}; nu*n = 1
  auto rn = robust_out_neighbourhood(complete_digraph(4), {0, 1}, Rational(1, 4));
  CHECK(rn == std::vector<Vertex>{0, 1, 2, 3});
}

TEST_CASE("robust outneighbourhood of the empty set is empty") {
  auto rn = robust_out_neighbourhood(complete_digraph(5), {}, Rational(1, 10));
  CHECK(rn.empty());
}

TEST_CASE("robust outneighbourhood on a directed cycle") {
  // only the successor of 0 has an inneighbour in S = {0}
  auto rn = robust_out_neighbourhood(directed_cycle(8), {0}, Rational(1, 8));
  CHECK(rn == std::vector<Vertex>{1});
}

TEST_CASE("monotone in S") {
  Rng rng(3);
  Multidigraph g(9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (i != j && rng.bernoulli(0.4)) g.add_edge(i, j);
  std::vector<Vertex> small{1, 3, 5}, big{1, 2, 3, 5, 7};
  auto rn_small = robust_out_neighbourhood(g, small, Rational(1, 5));
  auto rn_big = robust_out_neighbourhood(g, big, Rational(1, 5));
  CHECK(std::includes(rn_big.begin(), rn_big.end(), rn_small.begin(), rn_small.end()));
}

TEST_CASE("complete digraph on 10 vertices is a robust expander") {
  ExpanderParams params{Rational(1, 10), Rational(1, 5), std::nullopt, Rational(0)};
  auto verdict = is_robust_outexpander(complete_digraph(10), params, ExpanderMode::Exhaustive);
  CHECK(verdict.holds());
}

TEST_CASE("directed cycle C10 has a counterexample") {
  ExpanderParams params{Rational(1, 10), Rational(1, 5), std::nullopt, Rational(0)};
  auto verdict = is_robust_outexpander(directed_cycle(10), params, ExpanderMode::Exhaustive);
  CHECK(verdict.kind == ExpanderVerdict::Kind::Counterexample);
  // witness really violates the expansion inequality
  auto rn = robust_out_neighbourhood(directed_cycle(10), verdict.witness, params.nu);
  CHECK(static_cast<long long>(rn.size()) <
        static_cast<long long>(verdict.witness.size()) + 1);  // nu*n = 1
}

TEST_CASE("blow-up of a robust expander passes at (nu^3, 2tau)") {
  Multidigraph g = complete_digraph(5);
  ExpanderParams base{Rational(1, 5), Rational(1, 4), std::nullopt, Rational(0)};
  REQUIRE(is_robust_outexpander(g, base, ExpanderMode::Exhaustive).holds());
  BlowUp b = blow_up(g, 3);
  ExpanderParams blown{base.nu * base.nu * base.nu, Rational(2) * base.tau, std::nullopt,
                       Rational(0)};
  auto verdict = is_robust_outexpander(b.graph, blown, ExpanderMode::Exhaustive, 0, 0, 15);
  CHECK(verdict.holds());
}

TEST_CASE("nu-monotonicity at n <= 12") {
  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    Multidigraph g(10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if (i != j && rng.bernoulli(0.55)) g.add_edge(i, j);
    ExpanderParams strong{Rational(1, 8), Rational(1, 5), std::nullopt, Rational(0)};
    ExpanderParams weak{Rational(1, 16), Rational(1, 5), std::nullopt, Rational(0)};
    auto v_strong = is_robust_outexpander(g, strong, ExpanderMode::Exhaustive);
    if (v_strong.holds()) {
      auto v_weak = is_robust_outexpander(g, weak, ExpanderMode::Exhaustive);
      CHECK(v_weak.holds());
    }
  }
}

TEST_CASE("sampled mode never certifies and finds planted violations") {
  ExpanderParams params{Rational(1, 10), Rational(1, 5), std::nullopt, Rational(0)};
  auto on_good = is_robust_outexpander(complete_digraph(10), params, ExpanderMode::Sampled, 50, 5);
  CHECK(on_good.kind == ExpanderVerdict::Kind::NoViolationFound);
  auto on_bad = is_robust_outexpander(directed_cycle(30), params, ExpanderMode::Sampled, 200, 5);
  CHECK(on_bad.kind == ExpanderVerdict::Kind::Counterexample);
}

TEST_CASE("exhaustive mode above the cap throws") {
  ExpanderParams params{Rational(1, 10), Rational(1, 5), std::nullopt, Rational(0)};
  CHECK_THROWS(is_robust_outexpander(complete_digraph(23), params, ExpanderMode::Exhaustive));
}

TEST_CASE("expander parameter validation") {
  ExpanderParams bad{Rational(1, 2), Rational(1, 4), std::nullopt, Rational(0)};  // nu > tau
  CHECK_THROWS(bad.validate());
}
