#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hamdec/graph.hpp"

namespace hamdec {

struct HamiltonResult {
  std::optional<std::vector<Vertex>> cycle;  // visit order, length n
  long long expansions = 0;
  bool exhausted() const { return !cycle.has_value(); }
};

// Seeded Hamilton-cycle search: exact bitmask DP up to dp_cap vertices,
// bidirectional path extension with backtracking and anchor restarts above
// that. Never reports a false negative: an exhausted budget is explicit.
HamiltonResult find_hamilton(const Multidigraph& G, long long budget = 1000000,
                             uint64_t seed = 0, int dp_cap = 14);

// Checks that `cycle` visits every vertex of G exactly once along edges of G.
bool verify_hamilton_cycle(const Multidigraph& G, const std::vector<Vertex>& cycle);

// sigma: V_{i+1} -> V_i, "walk the factor from x until first entering V_i".
struct LinkagePermutation {
  std::vector<Vertex> from;  // vertices of V_{i+1}
  std::vector<Vertex> to;    // sigma(from[k]) in V_i
  Vertex apply(Vertex x) const;
  Vertex invert(Vertex y) const;
};

LinkagePermutation linkage(const OneFactor& factor, const std::vector<Vertex>& cluster_i,
                           const std::vector<Vertex>& cluster_i1);

// One cluster cycle with its clusters in cyclic order; pair j lives between
// clusters[j] and clusters[j+1 mod k]. Pair graphs use local indices aligned
// with the cluster vertex lists.
struct MergeContext {
  std::vector<std::vector<Vertex>> clusters;
  std::vector<int> j_pairs;  // indices of pairs available for replacement
  // pair_graph(j) returns the reservoir pair for pair j (may be mutated by
  // consumption); null when no reservoir is available on that pair.
  std::function<BipartitePair*(int)> pair_graph;
};

struct MergeStats {
  int aux_size = 0;
  int aux_min_out = 0;
  int aux_min_in = 0;
  long long expansions = 0;
  int attempts = 0;
};

struct MergeOutcome {
  bool ok = false;
  OneFactor factor;  // updated factor when ok
  // consumed matching as (left vertex, right vertex) global pairs
  std::vector<std::pair<Vertex, Vertex>> consumed;
  MergeStats stats;
  std::string error;
};

// Replaces the factor's perfect matching on pair j of ctx with a matching
// from the reservoir so that all factor cycles meeting clusters[j] merge
// into one. Retries the auxiliary Hamilton search with fresh seeds.
MergeOutcome merge_at_pair(const MergeContext& ctx, int pair_index, const OneFactor& factor,
                           long long budget, uint64_t seed, int retries = 4);

struct FactorMergeResult {
  bool ok = false;
  OneFactor hamilton;  // single-cycle factor when ok
  std::vector<std::pair<Vertex, Vertex>> consumed;  // all replacement edges used
  std::string error;
  int merges_applied = 0;
};

// Applies merge_at_pair over every context (one per cluster cycle of F_i),
// using each context's j_pairs in order, then checks the result is a single
// cycle. On failure consumed reservoir edges are restored by the caller
// (consumed edges are reported either way).
FactorMergeResult merge_factor(const std::vector<MergeContext>& contexts, const OneFactor& factor,
                               long long budget, uint64_t seed, int retries = 4);

}  // namespace hamdec
