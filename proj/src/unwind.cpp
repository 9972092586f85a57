#include "hamdec/unwind.hpp"

#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "hamdec/hammerge.hpp"
#include "hamdec/rng.hpp"

namespace hamdec {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

}  // namespace

int progression(int d, int k, int p) {
  if (d < 1 || d > p - 1) throw std::invalid_argument("progression: need 1 <= d <= p-1");
  if (k < 1) throw std::invalid_argument("progression: need k >= 1");
  long long r = (static_cast<long long>(k - 1) * d) % p;
  return static_cast<int>(r) + 1;
}

namespace {

// vertex id of (class j in 1..n, copy i in 1..p), class-major
inline Vertex vid(int j, int i, int p) { return (j - 1) * p + (i - 1); }

std::vector<Vertex> walk_cycle(const std::vector<Vertex>& succ, Vertex start) {
  std::vector<Vertex> order;
  std::vector<char> seen(succ.size(), 0);
  Vertex v = start;
  while (!seen[v]) {
    seen[v] = 1;
    order.push_back(v);
    v = succ[v];
  }
  if (order.size() != succ.size() || v != start)
    throw std::runtime_error("unwind: closed walk is not a single Hamilton cycle");
  return order;
}

}  // namespace

Unwinding unwind_cycle(int n, int p) {
  if (p <= 2 || !is_prime(p)) throw std::invalid_argument("unwind_cycle: p must be a prime > 2");
  if (n < 3) throw std::invalid_argument("unwind_cycle: need n >= 3");

  Unwinding result;
  result.base_cycle_length = n;
  result.fold = p;
  result.coprime = std::gcd(n, p) == 1;
  const int N = n * p;

  if (result.coprime) {
    for (int d = 1; d <= p - 1; ++d) {
      std::vector<Vertex> succ(N, -1);
      for (int k = 1; k <= N; ++k) {
        int j = ((k - 1) % n) + 1;
        int j_next = (k % n) + 1;
        succ[vid(j, progression(d, k, p), p)] = vid(j_next, progression(d, k + 1, p), p);
      }
      result.cycles.push_back(walk_cycle(succ, vid(1, 1, p)));
    }
    return result;
  }

  // Non-coprime: identify classes {n-1, n, 1} into one, unwind the (n-2)-class
  // blow-up, then re-expand through classes n-1 and n with shift matchings.
  const int n1 = n - 2;
  if (std::gcd(n1, p) != 1)
    throw std::runtime_error("unwind_cycle: n-2 not coprime to p (impossible for prime p > 2)");
  Unwinding sub = unwind_cycle(n1, p);
  result.patch_matchings.resize(p - 1);
  for (int d = 1; d <= p - 1; ++d) {
    const auto& tilde = sub.cycles[d - 1];
    std::vector<Vertex> succ(N, -1);
    const int M = static_cast<int>(tilde.size());
    for (int t = 0; t < M; ++t) {
      Vertex v = tilde[t], w = tilde[(t + 1) % M];
      int jv = v / p + 1, iv = v % p + 1;
      int jw = w / p + 1, iw = w % p + 1;
      if (jv < n1) {
        succ[vid(jv, iv, p)] = vid(jw, iw, p);
      } else {
        // replace x_{n-2}^i x_1^{i'} by x_{n-2}^i x_{n-1}^{i'}
        succ[vid(n1, iv, p)] = vid(n - 1, iw, p);
      }
    }
    // paths P_{i,d} = x_{n-1}^i -> x_n^{M_d(i)} -> x_1^i (cyclic shift by d)
    for (int i = 1; i <= p; ++i) {
      int ishift = ((i - 1 + d) % p) + 1;
      succ[vid(n - 1, i, p)] = vid(n, ishift, p);
      succ[vid(n, ishift, p)] = vid(1, i, p);
      result.patch_matchings[d - 1].emplace_back(i - 1, ishift - 1);
    }
    result.cycles.push_back(walk_cycle(succ, vid(1, 1, p)));
  }
  return result;
}

bool Unwinding::distance_property_holds() const {
  const int n = base_cycle_length, p = fold;
  const int N = n * p;
  const int limit = coprime ? n : n - 2;
  for (const auto& cycle : cycles) {
    std::vector<int> pos(N, -1);
    for (int t = 0; t < N; ++t) pos[cycle[t]] = t;
    for (int i = 1; i <= p; ++i) {
      for (int j1 = 1; j1 <= limit; ++j1) {
        for (int j2 = j1 + 1; j2 <= limit; ++j2) {
          int a = pos[vid(j1, i, p)], b = pos[vid(j2, i, p)];
          int fwd = (b - a + N) % N;
          if (std::min(fwd, N - fwd) < p) return false;
        }
      }
    }
  }
  return true;
}

bool Unwinding::edge_disjoint() const {
  std::set<std::pair<Vertex, Vertex>> seen;
  for (const auto& cycle : cycles) {
    const int M = static_cast<int>(cycle.size());
    for (int t = 0; t < M; ++t)
      if (!seen.emplace(cycle[t], cycle[(t + 1) % M]).second) return false;
  }
  return true;
}

namespace {

// Any (s-1)-unwinding of s (x) C_K: peel Hamilton cycles from the residual
// blow-up with the exact/backtracking searcher, retrying the whole peel with
// fresh seeds when a later peel strands itself.
std::vector<std::vector<Vertex>> peel_unwinding(int K, int s, uint64_t seed) {
  const int N = K * s;
  auto make_blowup = [&]() {
    Multidigraph g(N);
    for (int l = 0; l < K; ++l)
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) g.add_edge(l * s + a, ((l + 1) % K) * s + b);
    return g;
  };
  const int whole_retries = 40;
  for (int attempt = 0; attempt < whole_retries; ++attempt) {
    Multidigraph residual = make_blowup();
    std::vector<std::vector<Vertex>> cycles;
    bool ok = true;
    for (int t = 0; t + 1 < s && ok; ++t) {
      HamiltonResult ham = find_hamilton(residual, 400000,
                                         seed + attempt * 1000003ULL + t * 7919ULL);
      if (!ham.cycle) {
        ok = false;
        break;
      }
      const auto& cyc = *ham.cycle;
      for (size_t i = 0; i < cyc.size(); ++i)
        residual.remove_edge(cyc[i], cyc[(i + 1) % cyc.size()]);
      cycles.push_back(cyc);
    }
    if (ok) return cycles;
  }
  throw std::runtime_error("double_unwind: could not peel an (s-1)-unwinding (cycle length " +
                           std::to_string(K) + ", fold " + std::to_string(s) + ")");
}

}  // namespace

DoubleUnwinding double_unwind(const OneFactor& primary_factor, int s, int p, uint64_t seed) {
  if (s < 2 || s % 2 != 0) throw std::invalid_argument("double_unwind: s must be even, >= 2");
  if (p <= 2 || !is_prime(p)) throw std::invalid_argument("double_unwind: p must be a prime > 2");
  const int L = primary_factor.vertex_count();

  DoubleUnwinding result;
  result.s = s;
  result.p = p;
  result.star_certified = true;

  // s-level: one (s-1)-unwinding per primary cycle, assembled into factors
  std::vector<std::vector<Vertex>> s_succ(s - 1, std::vector<Vertex>(L * s, -1));
  for (const auto& cycle : primary_factor.cycles()) {
    const int K = static_cast<int>(cycle.size());
    auto local = peel_unwinding(K, s, seed + cycle[0] * 65537ULL);
    for (int a = 0; a < s - 1; ++a) {
      const auto& cyc = local[a];
      for (size_t t = 0; t < cyc.size(); ++t) {
        Vertex v = cyc[t], w = cyc[(t + 1) % cyc.size()];
        Vertex gv = cycle[v / s] * s + (v % s);
        Vertex gw = cycle[w / s] * s + (w % s);
        s_succ[a][gv] = gw;
      }
    }
  }
  for (int a = 0; a < s - 1; ++a)
    result.s_factors.push_back(OneFactor::from_successor(s_succ[a]));

  // p-level: Lemma-style progression unwinding of every s-level cycle
  result.p_factors.assign(s - 1, {});
  for (int a = 0; a < s - 1; ++a) {
    std::vector<std::vector<Vertex>> p_succ(p - 1, std::vector<Vertex>(L * s * p, -1));
    for (const auto& cycle : result.s_factors[a].cycles()) {
      const int KD = static_cast<int>(cycle.size());
      Unwinding uw = unwind_cycle(KD, p);
      if (!uw.distance_property_holds() || !uw.edge_disjoint()) result.star_certified = false;
      for (int d = 0; d < p - 1; ++d) {
        const auto& cyc = uw.cycles[d];
        for (size_t t = 0; t < cyc.size(); ++t) {
          Vertex v = cyc[t], w = cyc[(t + 1) % cyc.size()];
          Vertex gv = cycle[v / p] * p + (v % p);
          Vertex gw = cycle[w / p] * p + (w % p);
          p_succ[d][gv] = gw;
        }
      }
    }
    for (int d = 0; d < p - 1; ++d)
      result.p_factors[a].push_back(OneFactor::from_successor(p_succ[d]));
  }
  return result;
}

}  // namespace hamdec
