#include "doctest.h"

#include <cmath>
#include <numeric>

#include "hamdec/derandom.hpp"
#include "hamdec/rng.hpp"

using namespace hamdec;

TEST_CASE("chernoff bound closed form") {
  CHECK(chernoff_bound(Rational(300), Rational(1, 10), Tail::Upper) ==
        doctest::Approx(std::exp(-1.0)));
  CHECK(chernoff_bound(Rational(30), Rational(9, 10), Tail::Lower) ==
        doctest::Approx(std::exp(-8.1)));
  // a -> 0 limit approaches 1
  CHECK(chernoff_bound(Rational(100), Rational(1, 1000000), Tail::Upper) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(chernoff_bound(Rational(10), Rational(1), Tail::Upper));
  CHECK_THROWS(chernoff_bound(Rational(0), Rational(1, 2), Tail::Upper));
}

TEST_CASE("single lower event forces a large ones count") {
  // score = exp(-0.81*50/3) = e^{-13.5} <= 1/2
  DerandomInstance inst;
  inst.variable_count = 100;
  inst.p = Rational(1, 2);
  std::vector<int> all(100);
  std::iota(all.begin(), all.end(), 0);
  inst.events.push_back({all, Tail::Lower, Rational(9, 10)});
  REQUIRE(inst.feasible());
  auto x = derandomize(inst);
  long long sum = std::accumulate(x.begin(), x.end(), 0LL);
  CHECK(sum > 5);  // phi > (1-0.9)*50 = 5
}

TEST_CASE("zero events give the all-zeros assignment") {
  DerandomInstance inst;
  inst.variable_count = 10;
  inst.p = Rational(1, 2);
  auto x = derandomize(inst);
  CHECK(std::accumulate(x.begin(), x.end(), 0) == 0);
}

TEST_CASE("refinement-shaped degree windows on a 60-variable toy instance") {
  // one vertex per variable, events = upper+lower windows per neighbourhood,
  // the Lemma-3.11 pattern at a feasible scale
  Rng rng(42);
  DerandomInstance inst;
  inst.variable_count = 60;
  inst.p = Rational(1, 2);
  for (int e = 0; e < 6; ++e) {
    std::vector<int> support;
    for (int j = 0; j < 60; ++j)
      if (rng.bernoulli(0.8)) support.push_back(j);
    inst.events.push_back({support, Tail::Upper, Rational(3, 4)});
    inst.events.push_back({support, Tail::Lower, Rational(3, 4)});
  }
  REQUIRE(inst.feasible());
  auto x = derandomize(inst);
  for (const auto& ev : inst.events) CHECK(event_satisfied(inst, ev, x));
}

TEST_CASE("derandomize is deterministic") {
  Rng rng(17);
  DerandomInstance inst;
  inst.variable_count = 80;
  inst.p = Rational(2, 3);
  for (int e = 0; e < 8; ++e) {
    std::vector<int> support;
    for (int j = 0; j < 80; ++j)
      if (rng.bernoulli(0.7)) support.push_back(j);
    inst.events.push_back({support, e % 2 ? Tail::Upper : Tail::Lower, Rational(4, 5)});
  }
  REQUIRE(inst.feasible());
  CHECK(derandomize(inst) == derandomize(inst));
}

TEST_CASE("infeasible score is rejected") {
  DerandomInstance inst;
  inst.variable_count = 10;
  inst.p = Rational(1, 2);
  // tiny mean, many events: score far above 1/2
  for (int e = 0; e < 20; ++e) inst.events.push_back({{0, 1}, Tail::Upper, Rational(1, 10)});
  CHECK_FALSE(inst.feasible());
  CHECK_THROWS(derandomize(inst));
}

TEST_CASE("instance validation rejects malformed events") {
  DerandomInstance inst;
  inst.variable_count = 5;
  inst.p = Rational(1, 2);
  inst.events.push_back({{}, Tail::Upper, Rational(1, 2)});  // empty support
  CHECK_THROWS(inst.validate());
  inst.events[0].support = {0};
  inst.events[0].beta = Rational(1);  // beta out of range
  CHECK_THROWS(inst.validate());
}
