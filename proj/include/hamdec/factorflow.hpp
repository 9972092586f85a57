#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hamdec/graph.hpp"

namespace hamdec {

// Exact in/out degree targets for a spanning subgraph. Sums must balance.
struct DegreePrescription {
  std::vector<int> out_demand;
  std::vector<int> in_demand;
};

struct MatchingResult {
  // matched[a] = b for every left vertex a when perfect; empty otherwise.
  std::vector<int> matched;
  // Hall violator: left set S with |N(S)| < |S| when no perfect matching.
  std::vector<int> hall_witness;
  bool perfect() const { return hall_witness.empty(); }
};

MatchingResult perfect_matching(const BipartitePair& pair);

// Peels r perfect matchings off the bipartite double cover of an r-regular
// multidigraph. Throws (naming a deviant vertex) when G is not r-regular.
std::vector<OneFactor> one_factorize(const Multidigraph& G, int r);

// Min cut returned when a prescription is infeasible. source_side holds the
// original vertices whose out-copy sits on the source side of the cut;
// capacity is recomputed from the instance, independently of the flow run.
struct CutCertificate {
  std::vector<int> source_side_out;
  std::vector<int> source_side_in;
  long long capacity = 0;
  long long demand_total = 0;
};

struct PrescribedResult {
  std::optional<Multidigraph> subgraph;
  std::optional<CutCertificate> cut;
  bool feasible() const { return subgraph.has_value(); }
};

// Spanning sub-multidigraph of Q with exact degrees, via max-flow.
// cap_per_pair, when given, caps the copies of (u,v) that may be used.
PrescribedResult prescribed_subgraph(
    const Multidigraph& Q, const DegreePrescription& demands,
    const std::function<int(Vertex, Vertex)>* cap_per_pair = nullptr);

struct PairSubgraphResult {
  std::optional<BipartitePair> subgraph;
  std::optional<CutCertificate> cut;
  bool feasible() const { return subgraph.has_value(); }
};

// Spanning subgraph of a bipartite pair with degrees kappa - m_a_plus[a] on
// the left and kappa - m_b_minus[b] on the right (Lemma-4.2-style b-matching).
PairSubgraphResult superregular_prescribed(const BipartitePair& pair,
                                           const std::vector<int>& m_a_plus,
                                           const std::vector<int>& m_b_minus, int kappa);

// Recomputes the capacity of a cut certificate directly from the instance.
long long recompute_cut_capacity(const Multidigraph& Q, const DegreePrescription& demands,
                                 const CutCertificate& cut,
                                 const std::function<int(Vertex, Vertex)>* cap_per_pair = nullptr);

}  // namespace hamdec
