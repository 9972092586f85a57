#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace hamdec {

using Vertex = int;

// Directed multigraph with per-pair multiplicities. Vertices are dense ids
// 0..n-1; cluster membership lives in external maps. Self-loops are rejected
// unless allow_loops is set (the unwinding patch removes loops explicitly
// before building on an identified vertex set).
class Multidigraph {
 public:
  Multidigraph() : n_(0) {}
  explicit Multidigraph(int n, bool allow_loops = false)
      : n_(n), allow_loops_(allow_loops), out_(n), in_(n) {}

  int vertex_count() const { return n_; }

  void add_edge(Vertex u, Vertex v, int mult = 1);
  // Removes up to `mult` copies; returns the number actually removed.
  int remove_edge(Vertex u, Vertex v, int mult = 1);

  int multiplicity(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    auto it = out_[u].find(v);
    return it == out_[u].end() ? 0 : it->second;
  }

  // Degrees count multiplicity.
  int out_degree(Vertex v) const;
  int in_degree(Vertex v) const;
  int min_semidegree() const;
  int max_semidegree() const;
  long long edge_count() const;  // with multiplicity

  // Sorted (neighbour, multiplicity) views.
  const std::map<Vertex, int>& out(Vertex v) const {
    check_vertex(v);
    return out_[v];
  }
  const std::map<Vertex, int>& in(Vertex v) const {
    check_vertex(v);
    return in_[v];
  }

  // Lexicographically sorted (u, v, mult) triples.
  std::vector<std::tuple<Vertex, Vertex, int>> edges() const;

  Multidigraph minus(const Multidigraph& other) const;
  Multidigraph plus(const Multidigraph& other) const;

  bool operator==(const Multidigraph& o) const { return n_ == o.n_ && out_ == o.out_; }

  std::string to_json() const;
  static Multidigraph from_json(const std::string& text);

 private:
  void check_vertex(Vertex v) const;
  int n_;
  bool allow_loops_ = false;
  std::vector<std::map<Vertex, int>> out_;
  std::vector<std::map<Vertex, int>> in_;
};

// Oriented bipartite pair: classes A (left) and B (right), simple edges all
// oriented left -> right, stored with local indices 0..na-1 / 0..nb-1.
class BipartitePair {
 public:
  BipartitePair() : na_(0), nb_(0) {}
  BipartitePair(int na, int nb);

  int left_size() const { return na_; }
  int right_size() const { return nb_; }

  void add_edge(int a, int b);
  void remove_edge(int a, int b);
  bool has_edge(int a, int b) const;

  int degree_left(int a) const { return static_cast<int>(adj_[a].size()); }
  int degree_right(int b) const { return static_cast<int>(radj_[b].size()); }
  const std::vector<int>& neighbours_left(int a) const { return adj_[a]; }
  const std::vector<int>& neighbours_right(int b) const { return radj_[b]; }

  long long edge_count() const;
  std::vector<std::pair<int, int>> edges() const;  // sorted (a, b)

  std::string to_json() const;
  static BipartitePair from_json(const std::string& text);

 private:
  int na_, nb_;
  std::vector<std::vector<int>> adj_;   // a -> sorted b list
  std::vector<std::vector<int>> radj_;  // b -> sorted a list
};

// Spanning 1-regular digraph stored as its successor permutation together
// with the derived cycle decomposition. Cycles have length >= 2.
class OneFactor {
 public:
  OneFactor() = default;

  const std::vector<Vertex>& successor() const { return succ_; }
  Vertex next(Vertex v) const { return succ_[v]; }
  const std::vector<std::vector<Vertex>>& cycles() const { return cycles_; }
  int vertex_count() const { return static_cast<int>(succ_.size()); }

  Multidigraph to_graph() const;

  // Validates bijectivity and absence of fixed points, derives cycles.
  static OneFactor from_successor(std::vector<Vertex> succ);

 private:
  std::vector<Vertex> succ_;
  std::vector<std::vector<Vertex>> cycles_;
};

// cycle_decomposition: permutation -> OneFactor (errors on non-bijections).
OneFactor cycle_decomposition(const std::vector<Vertex>& successor);

struct BlowUp {
  Multidigraph graph;
  std::vector<int> cluster_of;  // vertex -> class index in R
};

// r-fold blow-up: vertex x of R becomes block [x*r, (x+1)*r); every edge xy
// becomes a complete r x r block oriented toward y's copies. The class-major
// layout makes blow_up(blow_up(R,a),b) literally equal to blow_up(R,a*b).
BlowUp blow_up(const Multidigraph& R, int r);

// True iff every edge of G goes from cluster cycle_order[j] to
// cycle_order[j+1 mod k]. assignment[v] == -1 means unassigned; an edge with
// an unassigned endpoint is an error.
bool winds_around(const Multidigraph& G, const std::vector<int>& cycle_order,
                  const std::vector<int>& assignment);

}  // namespace hamdec
