#include "hamdec/hammerge.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

#include "hamdec/rng.hpp"

namespace hamdec {

namespace {

// Exact search, n <= ~20: dp[mask][v] = path 0 -> v covering mask exists.
std::optional<std::vector<Vertex>> hamilton_dp(const Multidigraph& G) {
  const int n = G.vertex_count();
  if (n < 2) return std::nullopt;
  std::vector<std::vector<int>> adj(n), radj(n);
  for (const auto& [u, v, m] : G.edges()) {
    adj[u].push_back(v);
    radj[v].push_back(u);
  }
  std::vector<uint32_t> dp(size_t(1) << n, 0);  // bit v: path 0->v covering mask
  dp[1] = 1;  // path at vertex 0, mask {0}
  for (uint32_t mask = 1; mask < (uint32_t(1) << n); ++mask) {
    if (!(mask & 1) || dp[mask] == 0) continue;
    uint32_t ends = dp[mask];
    for (int v = 0; v < n; ++v) {
      if (!(ends & (uint32_t(1) << v))) continue;
      for (int w : adj[v])
        if (!(mask & (uint32_t(1) << w))) dp[mask | (uint32_t(1) << w)] |= uint32_t(1) << w;
    }
  }
  uint32_t all = (n == 32) ? ~0u : ((uint32_t(1) << n) - 1);
  uint32_t closers = 0;
  for (int u : radj[0]) closers |= uint32_t(1) << u;
  uint32_t finals = dp[all] & closers;
  if (finals == 0) return std::nullopt;
  // reconstruct backwards
  std::vector<Vertex> cycle;
  uint32_t mask = all;
  int v = std::countr_zero(finals);
  while (true) {
    cycle.push_back(v);
    if (mask == 1u) break;
    uint32_t prev_mask = mask & ~(uint32_t(1) << v);
    int found = -1;
    for (int u : radj[v])
      if ((prev_mask & (uint32_t(1) << u)) && (dp[prev_mask] & (uint32_t(1) << u))) {
        found = u;
        break;
      }
    mask = prev_mask;
    v = found;
  }
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

struct Searcher {
  int n;
  std::vector<std::vector<int>> adj, radj;
  long long budget;
  long long expansions = 0;
  Rng rng;

  Searcher(const Multidigraph& G, long long budget_, uint64_t seed)
      : n(G.vertex_count()), adj(n), radj(n), budget(budget_), rng(seed) {
    for (const auto& [u, v, m] : G.edges()) {
      adj[u].push_back(v);
      radj[v].push_back(u);
    }
  }

  // Bidirectional extension with backtracking from a random anchor. The path
  // grows forward from its tail and backward from its head; choice points
  // are kept on an explicit stack.
  std::optional<std::vector<Vertex>> attempt(int anchor) {
    std::vector<int> path{anchor};
    std::vector<char> used(n, 0);
    used[anchor] = 1;
    struct Frame {
      bool forward;
      std::vector<int> options;
      size_t next = 0;
    };
    std::vector<Frame> stack;
    auto push_frame = [&]() {
      // prefer forward extension; fall back to backward
      Frame fr;
      fr.forward = true;
      for (int w : adj[path.back()])
        if (!used[w]) fr.options.push_back(w);
      if (fr.options.empty()) {
        fr.forward = false;
        for (int w : radj[path.front()])
          if (!used[w]) fr.options.push_back(w);
      }
      rng.shuffle(fr.options);
      stack.push_back(std::move(fr));
    };
    push_frame();
    while (!stack.empty()) {
      if (++expansions > budget) return std::nullopt;
      Frame& fr = stack.back();
      if (static_cast<int>(path.size()) == n) {
        // close the cycle: need edge tail -> head
        int tail = path.back(), head = path.front();
        bool closed = false;
        for (int w : adj[tail])
          if (w == head) closed = true;
        if (closed) return path;
        // dead end at full length: backtrack
        stack.pop_back();
        if (!stack.empty()) {
          if (stack.back().forward) {
            used[path.back()] = 0;
            path.pop_back();
          } else {
            used[path.front()] = 0;
            path.erase(path.begin());
          }
        }
        continue;
      }
      if (fr.next >= fr.options.size()) {
        stack.pop_back();
        if (!stack.empty()) {
          if (stack.back().forward) {
            used[path.back()] = 0;
            path.pop_back();
          } else {
            used[path.front()] = 0;
            path.erase(path.begin());
          }
        }
        continue;
      }
      int w = fr.options[fr.next++];
      if (fr.forward)
        path.push_back(w);
      else
        path.insert(path.begin(), w);
      used[w] = 1;
      push_frame();
    }
    return std::nullopt;
  }
};

}  // namespace

HamiltonResult find_hamilton(const Multidigraph& G, long long budget, uint64_t seed, int dp_cap) {
  HamiltonResult result;
  const int n = G.vertex_count();
  if (n < 2) return result;
  for (int v = 0; v < n; ++v)
    if (G.out(v).empty() || G.in(v).empty()) return result;  // trivially none
  if (n <= dp_cap) {
    result.cycle = hamilton_dp(G);
    return result;
  }
  Searcher searcher(G, budget, seed);
  while (searcher.expansions < budget) {
    int anchor = static_cast<int>(searcher.rng.below(static_cast<uint64_t>(n)));
    auto cycle = searcher.attempt(anchor);
    result.expansions = searcher.expansions;
    if (cycle) {
      result.cycle = std::move(cycle);
      return result;
    }
  }
  result.expansions = searcher.expansions;
  return result;
}

bool verify_hamilton_cycle(const Multidigraph& G, const std::vector<Vertex>& cycle) {
  const int n = G.vertex_count();
  if (static_cast<int>(cycle.size()) != n || n < 2) return false;
  std::vector<char> seen(n, 0);
  for (Vertex v : cycle) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (G.multiplicity(cycle[i], cycle[(i + 1) % n]) < 1) return false;
  return true;
}

Vertex LinkagePermutation::apply(Vertex x) const {
  for (size_t k = 0; k < from.size(); ++k)
    if (from[k] == x) return to[k];
  throw std::out_of_range("LinkagePermutation: not in domain");
}

Vertex LinkagePermutation::invert(Vertex y) const {
  for (size_t k = 0; k < to.size(); ++k)
    if (to[k] == y) return from[k];
  throw std::out_of_range("LinkagePermutation: not in image");
}

LinkagePermutation linkage(const OneFactor& factor, const std::vector<Vertex>& cluster_i,
                           const std::vector<Vertex>& cluster_i1) {
  const int n = factor.vertex_count();
  std::vector<char> in_i(n, 0), in_i1(n, 0);
  for (Vertex v : cluster_i) in_i[v] = 1;
  for (Vertex v : cluster_i1) in_i1[v] = 1;
  LinkagePermutation sigma;
  sigma.from = cluster_i1;
  sigma.to.reserve(cluster_i1.size());
  std::vector<char> hit(n, 0);
  for (Vertex x : cluster_i1) {
    Vertex cur = factor.next(x);
    int steps = 0;
    while (!in_i[cur]) {
      if (in_i1[cur])
        throw std::runtime_error("linkage: walk revisits V_{i+1} before reaching V_i");
      if (++steps > n) throw std::runtime_error("linkage: walk does not reach V_i");
      cur = factor.next(cur);
    }
    if (hit[cur]) throw std::runtime_error("linkage: sigma is not injective (malformed context)");
    hit[cur] = 1;
    sigma.to.push_back(cur);
  }
  return sigma;
}

MergeOutcome merge_at_pair(const MergeContext& ctx, int pair_index, const OneFactor& factor,
                           long long budget, uint64_t seed, int retries) {
  MergeOutcome outcome;
  const int k = static_cast<int>(ctx.clusters.size());
  const auto& Vi = ctx.clusters[pair_index];
  const auto& Vi1 = ctx.clusters[(pair_index + 1) % k];
  const int m = static_cast<int>(Vi.size());
  if (m == 0 || Vi1.size() != Vi.size()) {
    outcome.error = "merge_at_pair: cluster sizes mismatch";
    return outcome;
  }
  BipartitePair* pair = ctx.pair_graph(pair_index);
  if (pair == nullptr || pair->edge_count() == 0) {
    outcome.error = "merge_at_pair: empty reservoir pair";
    return outcome;
  }

  // Lemma condition (i): the factor currently matches V_i onto V_{i+1}.
  const int n = factor.vertex_count();
  std::vector<int> idx_in_i1(n, -1);
  for (size_t t = 0; t < Vi1.size(); ++t) idx_in_i1[Vi1[t]] = static_cast<int>(t);
  for (Vertex v : Vi)
    if (idx_in_i1[factor.next(v)] < 0) {
      outcome.error = "merge_at_pair: factor is not a perfect matching on the pair";
      return outcome;
    }

  std::vector<char> in_i_before(n, 0);
  for (Vertex v : Vi) in_i_before[v] = 1;
  int meeting_before = 0;
  for (const auto& cycle : factor.cycles())
    for (Vertex v : cycle)
      if (in_i_before[v]) {
        ++meeting_before;
        break;
      }

  LinkagePermutation sigma = linkage(factor, Vi, Vi1);
  // local index of sigma^{-1}(w) for every w in V_i
  std::vector<int> pos_in_i(n, -1);
  for (size_t t = 0; t < Vi.size(); ++t) pos_in_i[Vi[t]] = static_cast<int>(t);
  std::vector<int> sigma_inv_local(m);  // V_i local -> V_{i+1} local
  for (size_t t = 0; t < sigma.from.size(); ++t) {
    int w_local = pos_in_i[sigma.to[t]];
    int x_local = idx_in_i1[sigma.from[t]];
    sigma_inv_local[w_local] = x_local;
  }

  // D_aux on V_i: u -> w iff reservoir has the edge u -> sigma^{-1}(w)
  Multidigraph aux(m);
  for (int u = 0; u < m; ++u)
    for (int w = 0; w < m; ++w)
      if (u != w && pair->has_edge(u, sigma_inv_local[w])) aux.add_edge(u, w);
  // self-loop positions u == w mean "reuse sigma^{-1}(u)"; a Hamilton cycle
  // cannot use them anyway (no loops), matching the digraph convention.

  outcome.stats.aux_size = m;
  outcome.stats.aux_min_out = m;
  outcome.stats.aux_min_in = m;
  for (int v = 0; v < m; ++v) {
    outcome.stats.aux_min_out = std::min(outcome.stats.aux_min_out, aux.out_degree(v));
    outcome.stats.aux_min_in = std::min(outcome.stats.aux_min_in, aux.in_degree(v));
  }

  std::optional<std::vector<Vertex>> aux_cycle;
  for (int attempt = 0; attempt < retries && !aux_cycle; ++attempt) {
    ++outcome.stats.attempts;
    HamiltonResult ham = find_hamilton(aux, budget, seed + 0x517cc1b727220a95ULL * attempt);
    outcome.stats.expansions += ham.expansions;
    if (ham.cycle) aux_cycle = std::move(ham.cycle);
  }
  if (!aux_cycle) {
    outcome.error = "merge_at_pair: auxiliary Hamilton search exhausted";
    return outcome;
  }

  const int old_cycles = static_cast<int>(factor.cycles().size());
  std::vector<Vertex> succ = factor.successor();
  for (int t = 0; t < m; ++t) {
    int u_local = (*aux_cycle)[t];
    int next_local = (*aux_cycle)[(t + 1) % m];
    Vertex u = Vi[u_local];
    Vertex target = Vi1[sigma_inv_local[next_local]];
    succ[u] = target;
    outcome.consumed.emplace_back(u, target);
  }
  outcome.factor = OneFactor::from_successor(std::move(succ));

  // exact postconditions: one cycle through V_i; the total drops strictly
  // whenever more than one cycle met V_i before
  int meeting = 0;
  for (const auto& cycle : outcome.factor.cycles())
    for (Vertex v : cycle)
      if (in_i_before[v]) {
        ++meeting;
        break;
      }
  if (meeting != 1)
    throw std::runtime_error("merge_at_pair: postcondition failed (cycles through V_i != 1)");
  const int new_cycles = static_cast<int>(outcome.factor.cycles().size());
  if (meeting_before > 1 && new_cycles >= old_cycles)
    throw std::runtime_error("merge_at_pair: postcondition failed (cycle count did not drop)");

  // consume the replacement matching from the reservoir
  for (int t = 0; t < m; ++t) {
    int u_local = (*aux_cycle)[t];
    int next_local = (*aux_cycle)[(t + 1) % m];
    pair->remove_edge(u_local, sigma_inv_local[next_local]);
  }
  outcome.ok = true;
  return outcome;
}

FactorMergeResult merge_factor(const std::vector<MergeContext>& contexts, const OneFactor& factor,
                               long long budget, uint64_t seed, int retries) {
  FactorMergeResult result;
  const int n = factor.vertex_count();

  // condition (ii) scan: every factor cycle must hit some mergeable cluster
  std::vector<char> mergeable(n, 0);
  for (const auto& ctx : contexts)
    for (int j : ctx.j_pairs)
      for (Vertex v : ctx.clusters[j]) mergeable[v] = 1;
  for (const auto& cycle : factor.cycles()) {
    bool hit = false;
    for (Vertex v : cycle)
      if (mergeable[v]) {
        hit = true;
        break;
      }
    if (!hit) {
      result.error = "merge_factor: a factor cycle avoids every J pair (condition (ii) fails)";
      return result;
    }
  }

  OneFactor current = factor;
  for (size_t c = 0; c < contexts.size(); ++c) {
    for (int j : contexts[c].j_pairs) {
      if (current.cycles().size() == 1) break;
      // skip pairs whose clusters already sit on a single cycle: merging
      // there gains nothing and would waste a reservoir matching
      std::vector<char> in_i(n, 0);
      for (Vertex v : contexts[c].clusters[j]) in_i[v] = 1;
      int meeting = 0;
      for (const auto& cycle : current.cycles()) {
        for (Vertex v : cycle)
          if (in_i[v]) {
            ++meeting;
            break;
          }
      }
      if (meeting <= 1) continue;
      MergeOutcome outcome = merge_at_pair(contexts[c], j, current, budget,
                                           seed + 0x9e3779b97f4a7c15ULL * (c * 31 + j), retries);
      if (!outcome.ok) {
        result.error = outcome.error;
        result.consumed.insert(result.consumed.end(), outcome.consumed.begin(),
                               outcome.consumed.end());
        return result;
      }
      current = std::move(outcome.factor);
      result.consumed.insert(result.consumed.end(), outcome.consumed.begin(),
                             outcome.consumed.end());
      ++result.merges_applied;
    }
    if (current.cycles().size() == 1) break;
  }

  if (current.cycles().size() != 1) {
    result.error = "merge_factor: factor still has " +
                   std::to_string(current.cycles().size()) + " cycles after all merges";
    return result;
  }
  result.ok = true;
  result.hamilton = std::move(current);
  return result;
}

}  // namespace hamdec
