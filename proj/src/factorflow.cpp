#include "hamdec/factorflow.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace hamdec {

namespace {

// Dinic with deterministic edge order (edges added in caller order, BFS by
// ascending node id).
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), iter_(n) {}

  int add_edge(int from, int to, long long cap) {
    int id = static_cast<int>(to_.size());
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[from]);
    head_[from] = id;
    to_.push_back(from);
    cap_.push_back(0);
    next_.push_back(head_[to]);
    head_[to] = id + 1;
    return id;
  }

  long long flow_on(int edge_id) const { return cap_[edge_id ^ 1]; }

  long long run(int s, int t) {
    long long total = 0;
    while (bfs(s, t)) {
      iter_ = head_;
      long long f;
      while ((f = dfs(s, t, std::numeric_limits<long long>::max())) > 0) total += f;
    }
    return total;
  }

  // After run(), level_[v] >= 0 iff v is reachable from s in the residual.
  bool reachable(int v) const { return level_[v] >= 0; }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e = head_[v]; e >= 0; e = next_[e]) {
        if (cap_[e] > 0 && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[v] + 1;
          q.push(to_[e]);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long dfs(int v, int t, long long limit) {
    if (v == t) return limit;
    for (int& e = iter_[v]; e >= 0; e = next_[e]) {
      int w = to_[e];
      if (cap_[e] > 0 && level_[w] == level_[v] + 1) {
        long long d = dfs(w, t, std::min(limit, cap_[e]));
        if (d > 0) {
          cap_[e] -= d;
          cap_[e ^ 1] += d;
          return d;
        }
      }
    }
    level_[v] = -1;
    return 0;
  }

  std::vector<int> head_, level_, iter_, to_, next_;
  std::vector<long long> cap_;
};

// Kuhn augmenting-path matching with lexicographic scan order; also exposes
// the alternating-reachability set needed for a Hall witness.
struct Matcher {
  const BipartitePair& pair;
  std::vector<int> match_left, match_right;

  explicit Matcher(const BipartitePair& p)
      : pair(p), match_left(p.left_size(), -1), match_right(p.right_size(), -1) {}

  bool augment(int a, std::vector<char>& visited) {
    for (int b : pair.neighbours_left(a)) {
      if (visited[b]) continue;
      visited[b] = 1;
      if (match_right[b] < 0 || augment(match_right[b], visited)) {
        match_left[a] = b;
        match_right[b] = a;
        return true;
      }
    }
    return false;
  }

  int run() {
    int size = 0;
    for (int a = 0; a < pair.left_size(); ++a) {
      std::vector<char> visited(pair.right_size(), 0);
      if (augment(a, visited)) ++size;
    }
    return size;
  }
};

}  // namespace

MatchingResult perfect_matching(const BipartitePair& pair) {
  if (pair.left_size() != pair.right_size())
    throw std::invalid_argument("perfect_matching: classes must have equal size");
  Matcher m(pair);
  int size = m.run();
  MatchingResult result;
  if (size == pair.left_size()) {
    result.matched = m.match_left;
    return result;
  }
  // Hall violator: unmatched lefts plus lefts reachable by alternating paths.
  std::vector<char> left_in(pair.left_size(), 0), right_in(pair.right_size(), 0);
  std::queue<int> q;
  for (int a = 0; a < pair.left_size(); ++a)
    if (m.match_left[a] < 0) {
      left_in[a] = 1;
      q.push(a);
    }
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    for (int b : pair.neighbours_left(a)) {
      if (right_in[b]) continue;
      right_in[b] = 1;
      int a2 = m.match_right[b];
      if (a2 >= 0 && !left_in[a2]) {
        left_in[a2] = 1;
        q.push(a2);
      }
    }
  }
  for (int a = 0; a < pair.left_size(); ++a)
    if (left_in[a]) result.hall_witness.push_back(a);
  return result;
}

std::vector<OneFactor> one_factorize(const Multidigraph& G, int r) {
  const int n = G.vertex_count();
  for (int v = 0; v < n; ++v) {
    if (G.out_degree(v) != r || G.in_degree(v) != r)
      throw std::invalid_argument("one_factorize: vertex " + std::to_string(v) +
                                  " is not " + std::to_string(r) + "-regular (out " +
                                  std::to_string(G.out_degree(v)) + ", in " +
                                  std::to_string(G.in_degree(v)) + ")");
  }
  // Bipartite double cover with residual multiplicities; peel r perfect
  // matchings, each giving a successor permutation.
  std::vector<std::map<Vertex, int>> residual(n);
  for (const auto& [u, v, m] : G.edges()) residual[u][v] = m;

  std::vector<OneFactor> factors;
  factors.reserve(r);
  for (int t = 0; t < r; ++t) {
    BipartitePair cover(n, n);
    for (int u = 0; u < n; ++u)
      for (const auto& [v, m] : residual[u])
        if (m > 0) cover.add_edge(u, v);
    MatchingResult match = perfect_matching(cover);
    if (!match.perfect())
      throw std::runtime_error("one_factorize: matching peel failed (graph not regular?)");
    for (int u = 0; u < n; ++u) {
      int v = match.matched[u];
      if (--residual[u][v] == 0) residual[u].erase(v);
    }
    factors.push_back(OneFactor::from_successor(match.matched));
  }
  return factors;
}

namespace {

struct FlowLayout {
  // node ids: source 0, out-copy of v = 1+v, in-copy of v = 1+n+v, sink 1+2n
  int n;
  int source() const { return 0; }
  int out_node(int v) const { return 1 + v; }
  int in_node(int v) const { return 1 + n + v; }
  int sink() const { return 1 + 2 * n; }
  int node_count() const { return 2 * n + 2; }
};

}  // namespace

PrescribedResult prescribed_subgraph(const Multidigraph& Q, const DegreePrescription& demands,
                                     const std::function<int(Vertex, Vertex)>* cap_per_pair) {
  const int n = Q.vertex_count();
  if (static_cast<int>(demands.out_demand.size()) != n ||
      static_cast<int>(demands.in_demand.size()) != n)
    throw std::invalid_argument("prescribed_subgraph: demand vectors must span V(Q)");
  long long total_out = std::accumulate(demands.out_demand.begin(), demands.out_demand.end(), 0LL);
  long long total_in = std::accumulate(demands.in_demand.begin(), demands.in_demand.end(), 0LL);
  if (total_out != total_in)
    throw std::invalid_argument("prescribed_subgraph: demands are unbalanced");

  FlowLayout ly{n};
  MaxFlow flow(ly.node_count());
  for (int v = 0; v < n; ++v) {
    flow.add_edge(ly.source(), ly.out_node(v), demands.out_demand[v]);
    flow.add_edge(ly.in_node(v), ly.sink(), demands.in_demand[v]);
  }
  std::vector<std::tuple<int, int, int>> pair_edges;  // (u, v, edge_id)
  for (const auto& [u, v, mult] : Q.edges()) {
    int cap = mult;
    if (cap_per_pair) cap = std::min(cap, (*cap_per_pair)(u, v));
    if (cap <= 0) continue;
    int id = flow.add_edge(ly.out_node(u), ly.in_node(v), cap);
    pair_edges.emplace_back(u, v, id);
  }
  long long value = flow.run(ly.source(), ly.sink());

  PrescribedResult result;
  if (value == total_out) {
    Multidigraph sub(n);
    for (const auto& [u, v, id] : pair_edges) {
      long long f = flow.flow_on(id);
      if (f > 0) sub.add_edge(u, v, static_cast<int>(f));
    }
    result.subgraph = std::move(sub);
    return result;
  }
  CutCertificate cut;
  cut.demand_total = total_out;
  for (int v = 0; v < n; ++v) {
    if (flow.reachable(ly.out_node(v))) cut.source_side_out.push_back(v);
    if (flow.reachable(ly.in_node(v))) cut.source_side_in.push_back(v);
  }
  cut.capacity = recompute_cut_capacity(Q, demands, cut, cap_per_pair);
  result.cut = std::move(cut);
  return result;
}

long long recompute_cut_capacity(const Multidigraph& Q, const DegreePrescription& demands,
                                 const CutCertificate& cut,
                                 const std::function<int(Vertex, Vertex)>* cap_per_pair) {
  const int n = Q.vertex_count();
  std::vector<char> out_side(n, 0), in_side(n, 0);
  for (int v : cut.source_side_out) out_side[v] = 1;
  for (int v : cut.source_side_in) in_side[v] = 1;
  long long capacity = 0;
  for (int v = 0; v < n; ++v) {
    if (!out_side[v]) capacity += demands.out_demand[v];  // source -> out(v) crosses
    if (in_side[v]) capacity += demands.in_demand[v];     // in(v) -> sink crosses
  }
  for (const auto& [u, v, mult] : Q.edges()) {
    if (out_side[u] && !in_side[v]) {
      int cap = mult;
      if (cap_per_pair) cap = std::min(cap, (*cap_per_pair)(u, v));
      capacity += std::max(cap, 0);
    }
  }
  return capacity;
}

PairSubgraphResult superregular_prescribed(const BipartitePair& pair,
                                           const std::vector<int>& m_a_plus,
                                           const std::vector<int>& m_b_minus, int kappa) {
  const int na = pair.left_size(), nb = pair.right_size();
  if (static_cast<int>(m_a_plus.size()) != na || static_cast<int>(m_b_minus.size()) != nb)
    throw std::invalid_argument("superregular_prescribed: offset vectors must span the classes");
  long long total_left = 0, total_right = 0;
  for (int a = 0; a < na; ++a) {
    if (m_a_plus[a] > kappa) throw std::invalid_argument("superregular_prescribed: m_a exceeds kappa");
    total_left += kappa - m_a_plus[a];
  }
  for (int b = 0; b < nb; ++b) {
    if (m_b_minus[b] > kappa) throw std::invalid_argument("superregular_prescribed: m_b exceeds kappa");
    total_right += kappa - m_b_minus[b];
  }
  if (total_left != total_right)
    throw std::invalid_argument("superregular_prescribed: demands are unbalanced");

  // source 0, left 1..na, right na+1..na+nb, sink na+nb+1
  MaxFlow flow(na + nb + 2);
  const int source = 0, sink = na + nb + 1;
  for (int a = 0; a < na; ++a) flow.add_edge(source, 1 + a, kappa - m_a_plus[a]);
  for (int b = 0; b < nb; ++b) flow.add_edge(1 + na + b, sink, kappa - m_b_minus[b]);
  std::vector<std::tuple<int, int, int>> ids;
  for (int a = 0; a < na; ++a)
    for (int b : pair.neighbours_left(a)) ids.emplace_back(a, b, flow.add_edge(1 + a, 1 + na + b, 1));
  long long value = flow.run(source, sink);

  PairSubgraphResult result;
  if (value == total_left) {
    BipartitePair sub(na, nb);
    for (const auto& [a, b, id] : ids)
      if (flow.flow_on(id) > 0) sub.add_edge(a, b);
    result.subgraph = std::move(sub);
    return result;
  }
  CutCertificate cut;
  cut.demand_total = total_left;
  for (int a = 0; a < na; ++a)
    if (flow.reachable(1 + a)) cut.source_side_out.push_back(a);
  for (int b = 0; b < nb; ++b)
    if (flow.reachable(1 + na + b)) cut.source_side_in.push_back(b);
  std::vector<char> left_side(na, 0), right_side(nb, 0);
  for (int a : cut.source_side_out) left_side[a] = 1;
  for (int b : cut.source_side_in) right_side[b] = 1;
  cut.capacity = 0;
  for (int a = 0; a < na; ++a)
    if (!left_side[a]) cut.capacity += kappa - m_a_plus[a];
  for (int b = 0; b < nb; ++b)
    if (right_side[b]) cut.capacity += kappa - m_b_minus[b];
  for (int a = 0; a < na; ++a)
    if (left_side[a])
      for (int b : pair.neighbours_left(a))
        if (!right_side[b]) cut.capacity += 1;
  result.cut = std::move(cut);
  return result;
}

}  // namespace hamdec
