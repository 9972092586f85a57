#include "hamdec/balance.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <stdexcept>
#include <string>

namespace hamdec {

void BalancingProblem::validate() const {
  std::set<int> in_set(t_in.begin(), t_in.end()), out_set(t_out.begin(), t_out.end());
  for (int v : t_in)
    if (out_set.count(v)) throw std::invalid_argument("BalancingProblem: T_in and T_out intersect");
  long long sp = 0, sm = 0;
  for (const auto& [v, s] : s_plus) sp += s;
  for (const auto& [v, s] : s_minus) sm += s;
  if (sp != sm) throw std::invalid_argument("BalancingProblem: sum s_plus != sum s_minus");
  if (b < 1 || c < 1) throw std::invalid_argument("BalancingProblem: need b, c >= 1");
}

RedTally red_tally(const std::vector<std::pair<Vertex, Vertex>>& red_edges,
                   const std::vector<char>& exceptional, const std::vector<int>& cluster_of,
                   const std::vector<char>& in_red_cluster,
                   const std::vector<char>& out_red_cluster) {
  RedTally tally;
  for (const auto& [u, v] : red_edges) {
    bool ue = exceptional[u], ve = exceptional[v];
    if (ue && ve) throw std::runtime_error("red_tally: edge joins two exceptional vertices (Red2)");
    if (!ue && !ve) throw std::runtime_error("red_tally: edge not incident to the exceptional set");
    if (ue) {
      int cl = cluster_of[v];
      if (cl < 0 || !in_red_cluster[cl])
        throw std::runtime_error("red_tally: red edge enters a non-in-red cluster (Red4)");
      ++tally.s_minus[cl];
    } else {
      int cl = cluster_of[u];
      if (cl < 0 || !out_red_cluster[cl])
        throw std::runtime_error("red_tally: red edge leaves a non-out-red cluster (Red4)");
      ++tally.s_plus[cl];
    }
  }
  return tally;
}

RStar build_rstar(const BalancingProblem& problem, const Multidigraph& Rp) {
  problem.validate();
  if (problem.t_in.empty() || problem.t_out.empty())
    throw std::invalid_argument("build_rstar: T_in and T_out must be nonempty");
  RStar rstar;
  rstar.cluster_of = problem.t_in;
  rstar.cluster_of.insert(rstar.cluster_of.end(), problem.t_out.begin(), problem.t_out.end());
  std::sort(rstar.cluster_of.begin(), rstar.cluster_of.end());
  for (size_t i = 0; i < rstar.cluster_of.size(); ++i) rstar.local_of[rstar.cluster_of[i]] = i;

  std::set<int> in_set(problem.t_in.begin(), problem.t_in.end());
  std::set<int> out_set(problem.t_out.begin(), problem.t_out.end());

  rstar.graph = Multidigraph(static_cast<int>(rstar.cluster_of.size()));
  for (int V : rstar.cluster_of) {
    // base neighbourhood: N+(V-) for in-red V, N+(V) for out-red V
    int base_vertex = in_set.count(V) ? problem.pred.at(V) : V;
    std::set<int> targets;
    for (const auto& [W, mult] : Rp.out(base_vertex)) {
      if (in_set.count(W)) targets.insert(W);
      int wp = problem.pred.at(W);
      if (out_set.count(wp)) targets.insert(wp);  // W in T_out^+, mapped back
    }
    for (int W : targets) {
      if (W == V) continue;  // R* is loopless by the digraph convention
      rstar.graph.add_edge(rstar.local_of.at(V), rstar.local_of.at(W));
    }
  }
  return rstar;
}

ShadowResult shadow_sequence(const BalancingProblem& problem, const RStar& rstar) {
  problem.validate();
  const int T = rstar.graph.vertex_count();
  std::set<int> in_set(problem.t_in.begin(), problem.t_in.end());
  auto s_of = [](const std::map<int, long long>& m, int v) {
    auto it = m.find(v);
    return it == m.end() ? 0LL : it->second;
  };
  DegreePrescription demands;
  demands.out_demand.resize(T);
  demands.in_demand.resize(T);
  for (int i = 0; i < T; ++i) {
    int V = rstar.cluster_of[i];
    if (in_set.count(V)) {
      demands.out_demand[i] = static_cast<int>(s_of(problem.s_minus, V) + problem.c);
      demands.in_demand[i] = static_cast<int>(problem.c);
    } else {
      demands.out_demand[i] = static_cast<int>(problem.c);
      demands.in_demand[i] = static_cast<int>(s_of(problem.s_plus, V) + problem.c);
    }
  }
  // b-fold copy of R*
  Multidigraph bfold(T);
  for (const auto& [u, v, mult] : rstar.graph.edges())
    bfold.add_edge(u, v, static_cast<int>(problem.b));

  PrescribedResult flow = prescribed_subgraph(bfold, demands);
  ShadowResult result;
  if (flow.feasible())
    result.sequence = std::move(*flow.subgraph);
  else
    result.cut = std::move(flow.cut);
  return result;
}

BalancingEdges realize_balancing(const Multidigraph& shadow, const RStar& rstar,
                                 const BalancingProblem& problem, const PairLookup& lookup,
                                 int m_p) {
  std::set<int> in_set(problem.t_in.begin(), problem.t_in.end());
  BalancingEdges result;
  std::map<Vertex, int> out_load, in_load;

  for (const auto& [lu, lv, copies] : shadow.edges()) {
    int V = rstar.cluster_of[lu], W = rstar.cluster_of[lv];
    // Four-case correspondence back to an R_p edge (A, B).
    int A = in_set.count(V) ? problem.pred.at(V) : V;
    int B = in_set.count(W) ? W : problem.succ.at(W);
    PairRef ref = lookup(A, B);
    if (ref.pair == nullptr)
      throw std::runtime_error("realize_balancing: no reservoir pair on edge " +
                               std::to_string(A) + "->" + std::to_string(B));
    if (ref.pair->edge_count() < copies)
      throw std::runtime_error("realize_balancing: reservoir exhausted on pair " +
                               std::to_string(A) + "->" + std::to_string(B));
    // Per-vertex cap 8*copies/m_p, at least 1 (the Lemma-3.10 shape).
    const int cap = std::max<int>(1, static_cast<int>((8LL * copies + m_p - 1) / m_p));
    // Greedy lowest-load selection keeps the degrees spread.
    std::vector<int> deg_l(ref.pair->left_size(), 0), deg_r(ref.pair->right_size(), 0);
    std::vector<std::pair<int, int>> chosen;
    for (int t = 0; t < copies; ++t) {
      int best_a = -1, best_b = -1, best_score = INT_MAX;
      for (const auto& [a, bb] : ref.pair->edges()) {
        if (deg_l[a] >= cap || deg_r[bb] >= cap) continue;
        int score = std::max(deg_l[a], deg_r[bb]) * 1024 + (deg_l[a] + deg_r[bb]);
        if (score < best_score) {
          best_score = score;
          best_a = a;
          best_b = bb;
        }
      }
      if (best_a < 0)
        throw std::runtime_error("realize_balancing: degree cap starves pair " +
                                 std::to_string(A) + "->" + std::to_string(B));
      chosen.emplace_back(best_a, best_b);
      ++deg_l[best_a];
      ++deg_r[best_b];
      ref.pair->remove_edge(best_a, best_b);
    }
    for (const auto& [a, bb] : chosen) {
      Vertex gu = (*ref.left_ids)[a], gv = (*ref.right_ids)[bb];
      result.edges.emplace_back(gu, gv);
      ++result.d_plus[A];
      ++result.d_minus[B];
      result.max_vertex_degree = std::max(result.max_vertex_degree,
                                          std::max(++out_load[gu], ++in_load[gv]));
    }
  }
  return result;
}

int check_balance_condition(const RedTally& tally, const BalancingEdges& bal,
                            const std::vector<int>& succ, int cluster_count) {
  auto get = [](const std::map<int, long long>& m, int v) {
    auto it = m.find(v);
    return it == m.end() ? 0LL : it->second;
  };
  for (int V = 0; V < cluster_count; ++V) {
    if (succ[V] < 0) continue;
    long long d_plus = get(tally.s_plus, V) + get(bal.d_plus, V);
    long long d_minus = get(tally.s_minus, succ[V]) + get(bal.d_minus, succ[V]);
    if (d_plus != d_minus) return V;
  }
  return -1;
}

}  // namespace hamdec
