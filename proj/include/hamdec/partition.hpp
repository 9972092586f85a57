#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamdec/graph.hpp"
#include "hamdec/rational.hpp"

namespace hamdec {

// Exceptional set V0 plus equal-size clusters over ground set 0..n-1.
struct ClusterPartition {
  std::vector<int> exceptional;            // sorted
  std::vector<std::vector<int>> clusters;  // each sorted, equal sizes

  int cluster_size() const { return clusters.empty() ? 0 : static_cast<int>(clusters[0].size()); }
  int cluster_count() const { return static_cast<int>(clusters.size()); }
  int ground_size() const;
  void validate() const;  // disjointness, equal sizes, coverage of 0..n-1

  std::string to_json() const;
  static ClusterPartition from_json(const std::string& text);
};

struct AssociationMap {
  // For cluster index u of the finer/other partition, partner[u] is the index
  // of the associated cluster (or -1), with the witnessing overlap size.
  std::vector<int> partner;
  std::vector<int> overlap;
  bool bijective = false;
};

struct ClosenessVerdict {
  bool close = false;
  int failing_cluster = -1;  // cluster of Q with no associate, when !close
  bool exceptional_failed = false;
  AssociationMap association;
};

// eps-closeness of P (cluster size m) and Q (cluster size m' <= m):
// |V0(P) ∩ V0(Q)| >= (1-eps)|V0(Q)| and every cluster of Q overlaps some
// cluster of P in >= (1-eps) m' vertices.
ClosenessVerdict check_close(const ClusterPartition& P, const ClusterPartition& Q,
                             const Rational& eps);

// eps-uniform l-refinement: splits every cluster into l equal parts such that
// (URef) holds for every graph in `graphs`: whenever |N(x) ∩ V| >= eps|V|,
// each part V' has |N(x) ∩ V'| = (1 +- eps)|N(x) ∩ V|/l, in- and outbound.
// Construction: seeded random equipartition (derandomised split for l = 2
// when the Chernoff score permits), verified by a direct URef scan, with
// fresh seeds up to `retries`.
ClusterPartition uniform_refinement(const ClusterPartition& P, int ell,
                                    const std::vector<const Multidigraph*>& graphs,
                                    const Rational& eps, uint64_t seed, int retries = 16);

// Direct URef scan used by tests and as the construction's acceptance check.
bool uref_holds(const ClusterPartition& parent, const ClusterPartition& refined, int ell,
                const std::vector<const Multidigraph*>& graphs, const Rational& eps);

// Lemma-3.12 constructive step: given an l-refinement P_ref of P_base and a
// partition R that is eps2-close to P_base, produce an l-refinement of R that
// is close to P_ref (leftovers redistributed round-robin by cluster index).
ClusterPartition refine_close(const ClusterPartition& P_base, const ClusterPartition& P_ref,
                              const ClusterPartition& R, int ell, const Rational& eps2);

// Clean/red bookkeeping for one s-level 1-factor.
struct RedMarking {
  // Per s-cluster id (vertex of the s-level factor):
  std::vector<char> clean;
  std::vector<int> red_2p_index;  // k with t == k (mod 2p), -1 on clean clusters
  std::vector<char> in_red;       // disjoint from out_red
  std::vector<char> out_red;
};

struct RedScheme {
  int s = 0;
  int p = 0;
  int t = 0;          // original factor type (1-based)
  int f = 1;          // rank of the slice among those sharing k (1-based)
  int big_f = 1;      // F = r_p / 4p, the in/out flip threshold
  // primary_of[v] = primary cluster of s-cluster v; index_in_primary[v] in 1..s
  std::vector<int> primary_of;
  std::vector<int> index_in_primary;
};

// Marks the last K s-clusters of every length-K*s cycle clean, picks the red
// 2p-subcluster k == t (mod 2p) for the rest, and splits them into in-red /
// out-red index sets of size s/2 - 1 per primary cluster.
RedMarking mark_clean_and_red(const OneFactor& s_factor, const RedScheme& scheme);

}  // namespace hamdec
