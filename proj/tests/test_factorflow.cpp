#include "doctest.h"

#include <numeric>
#include <set>

#include "hamdec/factorflow.hpp"
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

// union of factors equals E(G) with multiplicity, factors pairwise disjoint
void check_factorization(const Multidigraph& g, const std::vector<OneFactor>& factors) {
  Multidigraph acc(g.vertex_count());
  for (const auto& f : factors) {
    Multidigraph fg = f.to_graph();
    for (int v = 0; v < g.vertex_count(); ++v) {
      CHECK(fg.out_degree(v) == 1);
      CHECK(fg.in_degree(v) == 1);
    }
    acc = acc.plus(fg);
  }
  CHECK(acc == g);
}

}  // namespace

TEST_CASE("perfect matching on a complete pair") {
  BipartitePair p(5, 5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) p.add_edge(a, b);
  auto result = perfect_matching(p);
  REQUIRE(result.perfect());
  std::set<int> targets(result.matched.begin(), result.matched.end());
  CHECK(targets.size() == 5);
}

TEST_CASE("isolated left vertex yields a Hall witness") {
  BipartitePair p(4, 4);
  for (int a = 1; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p.add_edge(a, b);
  auto result = perfect_matching(p);
  REQUIRE_FALSE(result.perfect());
  // witness S has |N(S)| < |S|
  std::set<int> nbrs;
  for (int a : result.hall_witness)
    for (int b : p.neighbours_left(a)) nbrs.insert(b);
  CHECK(nbrs.size() < result.hall_witness.size());
  CHECK(std::count(result.hall_witness.begin(), result.hall_witness.end(), 0) == 1);
}

TEST_CASE("random dense pair has a perfect matching, verified") {
  Rng rng(6);
  BipartitePair p(20, 20);
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b)
      if (rng.bernoulli(0.5)) p.add_edge(a, b);
  auto result = perfect_matching(p);
  REQUIRE(result.perfect());
  std::set<int> used;
  for (int a = 0; a < 20; ++a) {
    CHECK(p.has_edge(a, result.matched[a]));
    CHECK(used.insert(result.matched[a]).second);
  }
}

TEST_CASE("one_factorize a directed cycle is itself") {
  Multidigraph c(6);
  for (int i = 0; i < 6; ++i) c.add_edge(i, (i + 1) % 6);
  auto factors = one_factorize(c, 1);
  REQUIRE(factors.size() == 1);
  check_factorization(c, factors);
  CHECK(factors[0].cycles().size() == 1);
}

TEST_CASE("one_factorize K3 into two 1-factors") {
  auto g = complete_digraph(3);
  auto factors = one_factorize(g, 2);
  REQUIRE(factors.size() == 2);
  check_factorization(g, factors);
}

TEST_CASE("one_factorize the circulant tournament on 5 vertices") {
  Multidigraph g(5);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, (i + 2) % 5);
  }
  auto factors = one_factorize(g, 2);
  REQUIRE(factors.size() == 2);
  check_factorization(g, factors);
}

TEST_CASE("one_factorize rejects irregular input naming a deviant vertex") {
  Multidigraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 0);
  g.add_edge(0, 2);
  CHECK_THROWS_WITH_AS(one_factorize(g, 1), doctest::Contains("vertex"), std::invalid_argument);
}

TEST_CASE("one_factorize handles multiplicities") {
  Multidigraph g(2);
  g.add_edge(0, 1, 3);
  g.add_edge(1, 0, 3);
  auto factors = one_factorize(g, 3);
  REQUIRE(factors.size() == 3);
  check_factorization(g, factors);
}

TEST_CASE("prescribed subgraph: all demands 1 on K3 gives a 1-factor") {
  auto result = prescribed_subgraph(complete_digraph(3), {{1, 1, 1}, {1, 1, 1}});
  REQUIRE(result.feasible());
  for (int v = 0; v < 3; ++v) {
    CHECK(result.subgraph->out_degree(v) == 1);
    CHECK(result.subgraph->in_degree(v) == 1);
  }
}

TEST_CASE("prescribed subgraph: infeasible demand yields a valid cut certificate") {
  // vertex 0 has out-multiplicity 1 but demand 2
  Multidigraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 0, 2);
  g.add_edge(1, 0);
  auto result = prescribed_subgraph(g, {{2, 1, 1}, {2, 1, 1}});
  REQUIRE_FALSE(result.feasible());
  CHECK(result.cut->capacity < result.cut->demand_total);
  // independently recomputed
  CHECK(recompute_cut_capacity(g, {{2, 1, 1}, {2, 1, 1}}, *result.cut) == result.cut->capacity);
}

TEST_CASE("prescribed subgraph: W-removal pattern leaves an exactly regular remainder") {
  // multidigraph with uniform multiplicities; demands d(U) - r
  Rng rng(15);
  const int L = 6, mult = 4;
  Multidigraph r_beta(L);
  for (int t = 0; t < 3; ++t) {
    auto succ = rng.cyclic_permutation(L);
    for (int v = 0; v < L; ++v)
      if (v != succ[v]) r_beta.add_edge(v, succ[v], mult);
  }
  const int r_target = 9;
  DegreePrescription demands;
  for (int v = 0; v < L; ++v) {
    demands.out_demand.push_back(r_beta.out_degree(v) - r_target);
    demands.in_demand.push_back(r_beta.in_degree(v) - r_target);
  }
  auto result = prescribed_subgraph(r_beta, demands);
  REQUIRE(result.feasible());
  Multidigraph remainder = r_beta.minus(*result.subgraph);
  for (int v = 0; v < L; ++v) {
    CHECK(remainder.out_degree(v) == r_target);
    CHECK(remainder.in_degree(v) == r_target);
  }
}

TEST_CASE("prescribed subgraph degrees are exact on random feasible instances") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 12;
    Multidigraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.bernoulli(0.6)) g.add_edge(i, j, 1 + static_cast<int>(rng.below(3)));
    // plant a feasible prescription: take a random subgraph's degrees
    Multidigraph planted(n);
    for (const auto& [u, v, m] : g.edges()) {
      int take = static_cast<int>(rng.below(static_cast<uint64_t>(m) + 1));
      if (take > 0) planted.add_edge(u, v, take);
    }
    DegreePrescription demands;
    for (int v = 0; v < n; ++v) {
      demands.out_demand.push_back(planted.out_degree(v));
      demands.in_demand.push_back(planted.in_degree(v));
    }
    auto result = prescribed_subgraph(g, demands);
    REQUIRE(result.feasible());
    for (int v = 0; v < n; ++v) {
      CHECK(result.subgraph->out_degree(v) == demands.out_demand[v]);
      CHECK(result.subgraph->in_degree(v) == demands.in_demand[v]);
    }
  }
}

TEST_CASE("flow result is independent of edge insertion order") {
  Multidigraph g1(4), g2(4);
  std::vector<std::tuple<int, int, int>> edges{{0, 1, 2}, {1, 2, 1}, {2, 3, 2}, {3, 0, 1},
                                               {0, 2, 1}, {1, 3, 1}};
  for (const auto& [u, v, m] : edges) g1.add_edge(u, v, m);
  for (auto it = edges.rbegin(); it != edges.rend(); ++it)
    g2.add_edge(std::get<0>(*it), std::get<1>(*it), std::get<2>(*it));
  DegreePrescription demands{{1, 1, 1, 1}, {1, 1, 1, 1}};
  auto r1 = prescribed_subgraph(g1, demands);
  auto r2 = prescribed_subgraph(g2, demands);
  REQUIRE(r1.feasible());
  REQUIRE(r2.feasible());
  CHECK(*r1.subgraph == *r2.subgraph);
}

TEST_CASE("superregular_prescribed: kappa 1 on a matching-bearing pair") {
  BipartitePair p(4, 4);
  for (int i = 0; i < 4; ++i) {
    p.add_edge(i, i);
    p.add_edge(i, (i + 1) % 4);
  }
  auto result = superregular_prescribed(p, {0, 0, 0, 0}, {0, 0, 0, 0}, 1);
  REQUIRE(result.feasible());
  for (int a = 0; a < 4; ++a) CHECK(result.subgraph->degree_left(a) == 1);
}

TEST_CASE("superregular_prescribed: offsets shift individual degrees") {
  BipartitePair p(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p.add_edge(a, b);
  auto result = superregular_prescribed(p, {1, 0, 0, 0}, {1, 0, 0, 0}, 2);
  REQUIRE(result.feasible());
  CHECK(result.subgraph->degree_left(0) == 1);
  for (int a = 1; a < 4; ++a) CHECK(result.subgraph->degree_left(a) == 2);
  CHECK(result.subgraph->degree_right(0) == 1);
  for (int b = 1; b < 4; ++b) CHECK(result.subgraph->degree_right(b) == 2);
}

TEST_CASE("superregular_prescribed reports a cut on starved pairs") {
  BipartitePair p(3, 3);
  p.add_edge(0, 0);  // vertex 0 has degree 1 but needs 2
  for (int a = 1; a < 3; ++a)
    for (int b = 0; b < 3; ++b) p.add_edge(a, b);
  auto result = superregular_prescribed(p, {0, 0, 0}, {0, 0, 0}, 2);
  REQUIRE_FALSE(result.feasible());
  CHECK(result.cut->capacity < result.cut->demand_total);
}
