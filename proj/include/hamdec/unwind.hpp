#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hamdec/graph.hpp"

namespace hamdec {

// k-th term of the modular progression used by the unwinding, as a residue
// in 1..p (the convention maps multiples of p to p itself).
int progression(int d, int k, int p);

// (p-1)-unwinding of p (x) C_n. Vertex (class j in 1..n, copy i in 1..p) has
// id (j-1)*p + (i-1), matching the blow_up layout. cycles[d-1] lists the
// Hamilton cycle C^d in visit order.
struct Unwinding {
  int base_cycle_length = 0;  // n
  int fold = 0;               // p
  bool coprime = true;
  std::vector<std::vector<Vertex>> cycles;
  // Non-coprime case: patch matchings M_d between classes n-1 and n,
  // as (copy index i, copy index i') pairs, 0-based.
  std::vector<std::vector<std::pair<int, int>>> patch_matchings;

  // Pairwise min directed distance (both orientations) of the same-copy
  // representatives of classes 1..limit on every cycle; limit = n in the
  // coprime case and n-2 otherwise.
  bool distance_property_holds() const;
  bool edge_disjoint() const;
};

Unwinding unwind_cycle(int n, int p);

// Double unwinding of one primary-level 1-factor: each cycle is blown up
// s-fold and unwound into s-1 Hamilton cycles (any valid unwinding), each of
// which is blown up p-fold and unwound by the progression construction.
// s-cluster ids are primary*s + a; p-cluster ids are s_cluster*p + b.
struct DoubleUnwinding {
  int s = 0, p = 0;
  std::vector<OneFactor> s_factors;               // s-1 factors over s-cluster ids
  std::vector<std::vector<OneFactor>> p_factors;  // [a][b]: (s-1) x (p-1) factors
  bool star_certified = false;                    // distance >= p away from the two
                                                  // trailing classes, every cycle
};

DoubleUnwinding double_unwind(const OneFactor& primary_factor, int s, int p, uint64_t seed);

}  // namespace hamdec
