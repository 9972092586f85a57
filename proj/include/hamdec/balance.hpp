#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "hamdec/factorflow.hpp"
#include "hamdec/graph.hpp"
#include "hamdec/rational.hpp"

namespace hamdec {

// Red-cluster bookkeeping for one slice, at p-cluster granularity.
struct BalancingProblem {
  std::vector<int> t_in;   // in-red p-cluster ids, sorted
  std::vector<int> t_out;  // out-red p-cluster ids, sorted, disjoint from t_in
  std::map<int, long long> s_plus;   // red edges leaving each cluster
  std::map<int, long long> s_minus;  // red edges entering each cluster
  long long b = 1;                   // per-edge cap (ceiled, >= 1)
  long long c = 1;                   // base demand (ceiled, >= 1)
  std::vector<int> succ;  // cluster -> successor on its F_i cycle
  std::vector<int> pred;  // cluster -> predecessor

  void validate() const;  // disjointness and sum s_plus == sum s_minus
};

struct RedTally {
  std::map<int, long long> s_plus;
  std::map<int, long long> s_minus;
};

// Exact counts of red edges per cluster; errors when a red edge lands
// outside the declared red clusters or joins two exceptional vertices.
RedTally red_tally(const std::vector<std::pair<Vertex, Vertex>>& red_edges,
                   const std::vector<char>& exceptional, const std::vector<int>& cluster_of,
                   const std::vector<char>& in_red_cluster,
                   const std::vector<char>& out_red_cluster);

struct RStar {
  Multidigraph graph;          // on local ids 0..|T|-1
  std::vector<int> cluster_of;  // local id -> p-cluster id (sorted T)
  std::map<int, int> local_of;  // p-cluster id -> local id
};

// Auxiliary digraph on T = T_in ∪ T_out whose four-case out-neighbourhood
// rule mirrors how a red edge at V is balanced at V's cycle neighbours.
RStar build_rstar(const BalancingProblem& problem, const Multidigraph& Rp);

struct ShadowResult {
  std::optional<Multidigraph> sequence;  // on R* local ids, multiplicity = copies
  std::optional<CutCertificate> cut;
  bool feasible() const { return sequence.has_value(); }
};

// Degree-exact flow on the b-fold copy of R*: out-demand s_minus(V)+c on
// T_in / c on T_out, in-demand c on T_in / s_plus(V)+c on T_out.
ShadowResult shadow_sequence(const BalancingProblem& problem, const RStar& rstar);

struct PairRef {
  BipartitePair* pair = nullptr;               // mutable reservoir view
  const std::vector<Vertex>* left_ids = nullptr;   // local -> global vertex ids
  const std::vector<Vertex>* right_ids = nullptr;
};
using PairLookup = std::function<PairRef(int from_cluster, int to_cluster)>;

struct BalancingEdges {
  std::vector<std::pair<Vertex, Vertex>> edges;    // global vertex pairs
  std::map<int, long long> d_plus, d_minus;        // per-cluster tallies
  int max_vertex_degree = 0;                       // max per-vertex in/out load
};

// Realizes a shadow sequence as concrete reservoir edges: each shadow edge
// (V, W) maps to the R_p edge given by the four-case correspondence, and its
// copies are drawn from the reservoir pair on that edge with per-vertex
// degree cap 8*c(E)/m_p. Consumed edges are removed from the reservoir.
BalancingEdges realize_balancing(const Multidigraph& shadow, const RStar& rstar,
                                 const BalancingProblem& problem, const PairLookup& lookup,
                                 int m_p);

// (B2''): with red tallies t and balancing tallies bal, checks
// d_i^+(V) == d_i^-(succ(V)) for every cluster on a cycle; returns the first
// failing cluster or -1.
int check_balance_condition(const RedTally& tally, const BalancingEdges& bal,
                            const std::vector<int>& succ, int cluster_count);

}  // namespace hamdec
