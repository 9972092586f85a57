#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hamdec/balance.hpp"
#include "hamdec/graph.hpp"
#include "hamdec/partition.hpp"
#include "hamdec/rational.hpp"

namespace hamdec {

struct PipelineConfig {
  int s = 4;
  int p = 5;
  Rational beta{3, 20};
  Rational gamma{1, 25};
  Rational d{3, 10};
  Rational xi{1, 20};
  Rational eps_tilde{1, 100};
  Rational eps{1, 20};
  Rational eps_prime{1, 10};
  Rational eps_s{3, 25};
  Rational eps_p{3, 20};
  Rational eps_2p{1, 5};
  Rational eta{7, 10};
  Rational nu{1, 10};
  Rational tau{1, 5};
  uint64_t seed = 1;
  long long ham_budget = 2000000;
  int merge_retries = 4;
  int slice_retries = 16;
  int min_mp = 16;      // below this, slices stay at primary-cluster granularity
  int max_clusters = 12;

  Rational beta1() const { return (Rational(1) - Rational(5) * gamma) * beta; }
  Rational beta2() const { return (Rational(1) - gamma * gamma) * beta1(); }
  int kappa(int m_p) const { return static_cast<int>(((Rational(1) - gamma) * beta1() * Rational(m_p)).floor()); }

  void validate() const;  // s even, p odd prime, rationals in range
  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
};

enum class InstanceKind { Blowup, Tournament, Quasirandom };

struct GenParams {
  int L = 6;
  int m = 60;
  Rational density{1, 2};
  int reduced_degree = 3;
  std::optional<Multidigraph> reduced;  // user-supplied reduced digraph
  int n = 25;                           // tournament / quasirandom order
  Rational alpha{2, 5};                 // quasirandom edge probability
};

struct Instance {
  Multidigraph graph;
  ClusterPartition partition;
  Multidigraph reduced;  // support digraph on cluster ids (empty for L <= 1)
};

Instance generate_instance(InstanceKind kind, const GenParams& params, uint64_t seed);

// A bipartite pair graph anchored to concrete vertex id lists.
struct PairHandle {
  BipartitePair pair;
  std::vector<Vertex> left_ids;
  std::vector<Vertex> right_ids;
};

struct Reservoirs {
  // global thin reservoirs, merged over parallel copies, keyed by support edge
  std::map<std::pair<int, int>, PairHandle> h0p, h0m, h1p, h1m, h2;
  // residual pool: W-removed copies and floor leftovers, keyed by support edge
  std::map<std::pair<int, int>, PairHandle> pool;
  // per-factor slice pairs: key (factor t, from, to)
  std::map<std::tuple<int, int, int>, PairHandle> g_star;
};

struct ReducedStructure {
  std::vector<std::vector<Rational>> pair_density;  // L x L
  Multidigraph r_beta;   // multiplicities floor(d_ij / beta)
  Multidigraph w_removal;
  int r_tilde = 0;
  Rational alpha_tilde;
  std::vector<OneFactor> factors;  // r_tilde cluster-level 1-factors
  std::vector<int> evicted;        // vertices moved into V0 by the good-pair rule
  int hamilton_factors = 0;        // how many factors are single cycles
};

// Forms R(beta), evicts bad vertices, removes W by flow, 1-factorizes the
// r_tilde-regular remainder (Hamilton factors peeled first), slices every
// parallel copy into its beta-share pair graph and the six-way reservoir
// split, and assigns copies to factors.
struct ReduceResult {
  ReducedStructure reduced;
  Reservoirs reservoirs;
  ClusterPartition partition;  // with evictions applied
};
ReduceResult reduce_and_regularize(const Multidigraph& G, const ClusterPartition& partition,
                                   const Multidigraph& support, const PipelineConfig& config);

struct Slice {
  int index = -1;
  int t = -1;                  // original factor type
  OneFactor cluster_factor;    // over slice-granularity cluster ids
  std::vector<std::vector<Vertex>> cluster_vertices;
  std::map<std::pair<int, int>, PairHandle> pairs;  // per factor edge
  std::vector<Vertex> exceptional;
  std::vector<std::pair<Vertex, Vertex>> red_edges;
  std::vector<char> in_red, out_red;  // per cluster id
  int kappa = 0;
  int m_p = 0;
  bool refined = false;   // true when the s/p double unwinding was applied
  std::string failure;    // nonempty when the slice was abandoned
  bool ok() const { return failure.empty(); }
};

std::vector<Slice> build_slices(const Instance& instance, const ReduceResult& reduced,
                                const PipelineConfig& config);

struct SliceOutcome {
  int slice_index = -1;
  std::vector<std::vector<Vertex>> cycles;  // verified Hamilton cycles, global ids
  int factors_built = 0;
  int merge_failures = 0;
  std::string failure;
};

SliceOutcome decompose_slice(Slice& slice, Reservoirs& reservoirs, const Multidigraph& G,
                             const PipelineConfig& config);

struct DecomposeReport {
  int cycle_count = 0;
  int delta0 = 0;
  int r_tilde = 0;
  int kappa = 0;
  double achieved_fraction = 0.0;  // cycles / delta0
  long long edges_total = 0;
  long long edges_in_cycles = 0;
  std::vector<std::string> slice_diagnostics;
  std::vector<std::string> waivers;
  bool edge_disjoint_verified = false;
  bool all_cycles_verified = false;
  std::string to_json() const;
};

struct DecomposeResult {
  std::vector<std::vector<Vertex>> cycles;
  DecomposeReport report;
};

// Full chain on a certified instance. Every returned cycle is verified
// Hamiltonian on G and the set pairwise edge-disjoint (multiplicity-aware).
DecomposeResult approx_decompose(const Instance& instance, const PipelineConfig& config);

struct RegularizeResult {
  Multidigraph remainder;  // exactly target-regular
  Multidigraph removed;
  int target_degree = 0;
  std::vector<std::string> warnings;  // advisory precondition findings
};

// Corollary-1.2 step: removes a spanning subgraph with degrees
// d(x) - floor((alpha - sqrt(gamma)) n) so the remainder is exactly regular.
RegularizeResult regularize_almost_regular(const Multidigraph& G, const Rational& alpha,
                                           const Rational& gamma);

// Verifies cycles are Hamiltonian on G and pairwise edge-disjoint with
// multiplicity; returns an empty string or the first problem found.
std::string verify_cycles(const Multidigraph& G, const std::vector<std::vector<Vertex>>& cycles);

}  // namespace hamdec
