#include "doctest.h"

#include "hamdec/graph.hpp"
#include "hamdec/rational.hpp"
#include "hamdec/rng.hpp"

using namespace hamdec;

namespace {

Multidigraph directed_cycle(int n) {
  Multidigraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Multidigraph complete_digraph(int n) {
  Multidigraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("multidigraph degree sums match edge totals") {
  Multidigraph g(4);
  g.add_edge(0, 1, 3);
  g.add_edge(1, 2);
  g.add_edge(2, 0, 2);
  long long out_sum = 0, in_sum = 0;
  for (int v = 0; v < 4; ++v) {
    out_sum += g.out_degree(v);
    in_sum += g.in_degree(v);
  }
  CHECK(out_sum == g.edge_count());
  CHECK(in_sum == g.edge_count());
  CHECK(g.multiplicity(0, 1) == 3);
  CHECK_THROWS(g.add_edge(1, 1));  // self-loop
}

TEST_CASE("graph json round trip with deterministic edge order") {
  Multidigraph g(3);
  g.add_edge(2, 0, 2);
  g.add_edge(0, 1);
  std::string text = g.to_json();
  Multidigraph h = Multidigraph::from_json(text);
  CHECK(g == h);
  CHECK(text.find("[0,1,1]") < text.find("[2,0,2]"));  // lexicographic
}

TEST_CASE("1-fold blow-up is the identity") {
  Multidigraph c2(2);
  c2.add_edge(0, 1);
  c2.add_edge(1, 0);
  BlowUp b = blow_up(c2, 1);
  CHECK(b.graph == c2);
}

TEST_CASE("blow_up of C3 by 2") {
  BlowUp b = blow_up(directed_cycle(3), 2);
  CHECK(b.graph.vertex_count() == 6);
  CHECK(b.graph.edge_count() == 12);
  // each class pair a complete 2x2 block
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) CHECK(b.graph.multiplicity(0 * 2 + j, 1 * 2 + k) == 1);
}

TEST_CASE("blow-up multiplies the minimum semidegree exactly") {
  // delta0(r (x) R) = r * delta0(R) on a random 5-vertex digraph
  Rng rng(7);
  Multidigraph R(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j && rng.bernoulli(0.6)) R.add_edge(i, j);
  for (int v = 0; v < 5; ++v)
    if (R.out(v).empty() || R.in(v).empty()) R.add_edge(v, (v + 1) % 5);
  for (int r : {2, 3}) {
    BlowUp b = blow_up(R, r);
    CHECK(b.graph.min_semidegree() == r * R.min_semidegree());
  }
}

TEST_CASE("nested blow-ups compose under the class-major layout") {
  Multidigraph R(3);
  R.add_edge(0, 1);
  R.add_edge(1, 2);
  R.add_edge(2, 0);
  R.add_edge(0, 2);
  BlowUp ab = blow_up(blow_up(R, 2).graph, 3);
  BlowUp direct = blow_up(R, 6);
  CHECK(ab.graph == direct.graph);
}

TEST_CASE("winds_around accepts consecutive matchings and rejects inside edges") {
  // clusters {0,1}, {2,3}, {4,5} on a 3-cycle
  std::vector<int> assignment{0, 0, 1, 1, 2, 2};
  std::vector<int> order{0, 1, 2};
  Multidigraph g(6);
  g.add_edge(0, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 4);
  g.add_edge(4, 0);
  CHECK(winds_around(g, order, assignment));
  g.add_edge(0, 1);  // inside one cluster
  CHECK_FALSE(winds_around(g, order, assignment));

  Multidigraph h(6);
  h.add_edge(0, 4);  // skips a cluster
  CHECK_FALSE(winds_around(h, order, assignment));

  Multidigraph bad(6);
  bad.add_edge(0, 2);
  std::vector<int> partial{0, 0, -1, 1, 2, 2};
  CHECK_THROWS(winds_around(bad, order, partial));
}

TEST_CASE("cycle decomposition basics") {
  // 4-cycle permutation
  OneFactor f = cycle_decomposition({1, 2, 3, 0});
  CHECK(f.cycles().size() == 1);
  CHECK(f.cycles()[0].size() == 4);

  // two 2-cycles
  OneFactor g = cycle_decomposition({1, 0, 3, 2});
  CHECK(g.cycles().size() == 2);

  CHECK_THROWS(cycle_decomposition({0, 1, 2}));     // fixed points
  CHECK_THROWS(cycle_decomposition({1, 1, 0}));     // not a bijection
}

TEST_CASE("random permutation cycle count matches a follow-the-successor oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    // fixed-point-free permutation on 10 vertices
    std::vector<int> succ;
    do {
      succ = rng.permutation(10);
      bool fp = false;
      for (int i = 0; i < 10; ++i)
        if (succ[i] == i) fp = true;
      if (!fp) break;
    } while (true);
    OneFactor f = cycle_decomposition(succ);
    // oracle: trace successor chains independently
    std::vector<char> seen(10, 0);
    int cycles = 0;
    for (int v = 0; v < 10; ++v) {
      if (seen[v]) continue;
      ++cycles;
      int x = v;
      while (!seen[x]) {
        seen[x] = 1;
        x = succ[x];
      }
    }
    CHECK(static_cast<int>(f.cycles().size()) == cycles);
    // 1-regular spanning: every vertex exactly one successor and predecessor
    Multidigraph fg = f.to_graph();
    for (int v = 0; v < 10; ++v) {
      CHECK(fg.out_degree(v) == 1);
      CHECK(fg.in_degree(v) == 1);
    }
  }
}

TEST_CASE("rational arithmetic is exact") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a * b == Rational(1, 18));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational::parse("0.125") == Rational(1, 8));
  CHECK(Rational::parse("3/7") == Rational(3, 7));
  CHECK(Rational(1, 3) < Rational(34, 100));
}
