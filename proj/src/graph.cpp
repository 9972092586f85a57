#include "hamdec/graph.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hamdec {

void Multidigraph::check_vertex(Vertex v) const {
  if (v < 0 || v >= n_) throw std::out_of_range("Multidigraph: vertex out of range");
}

void Multidigraph::add_edge(Vertex u, Vertex v, int mult) {
  check_vertex(u);
  check_vertex(v);
  if (mult <= 0) throw std::invalid_argument("Multidigraph: multiplicity must be positive");
  if (u == v && !allow_loops_) throw std::invalid_argument("Multidigraph: self-loop");
  out_[u][v] += mult;
  in_[v][u] += mult;
}

int Multidigraph::remove_edge(Vertex u, Vertex v, int mult) {
  check_vertex(u);
  check_vertex(v);
  auto it = out_[u].find(v);
  if (it == out_[u].end()) return 0;
  int removed = std::min(it->second, mult);
  it->second -= removed;
  if (it->second == 0) out_[u].erase(it);
  auto jt = in_[v].find(u);
  jt->second -= removed;
  if (jt->second == 0) in_[v].erase(jt);
  return removed;
}

int Multidigraph::out_degree(Vertex v) const {
  check_vertex(v);
  int d = 0;
  for (const auto& [w, m] : out_[v]) d += m;
  return d;
}

int Multidigraph::in_degree(Vertex v) const {
  check_vertex(v);
  int d = 0;
  for (const auto& [w, m] : in_[v]) d += m;
  return d;
}

int Multidigraph::min_semidegree() const {
  if (n_ == 0) return 0;
  int d = out_degree(0);
  for (int v = 0; v < n_; ++v) d = std::min({d, out_degree(v), in_degree(v)});
  return d;
}

int Multidigraph::max_semidegree() const {
  int d = 0;
  for (int v = 0; v < n_; ++v) d = std::max({d, out_degree(v), in_degree(v)});
  return d;
}

long long Multidigraph::edge_count() const {
  long long total = 0;
  for (int v = 0; v < n_; ++v)
    for (const auto& [w, m] : out_[v]) total += m;
  return total;
}

std::vector<std::tuple<Vertex, Vertex, int>> Multidigraph::edges() const {
  std::vector<std::tuple<Vertex, Vertex, int>> es;
  for (int u = 0; u < n_; ++u)
    for (const auto& [v, m] : out_[u]) es.emplace_back(u, v, m);
  return es;
}

Multidigraph Multidigraph::minus(const Multidigraph& other) const {
  if (other.n_ != n_) throw std::invalid_argument("Multidigraph::minus: size mismatch");
  Multidigraph result(n_, allow_loops_);
  for (int u = 0; u < n_; ++u)
    for (const auto& [v, m] : out_[u]) {
      int keep = m - other.multiplicity(u, v);
      if (keep < 0) throw std::invalid_argument("Multidigraph::minus: not a subgraph");
      if (keep > 0) result.add_edge(u, v, keep);
    }
  return result;
}

Multidigraph Multidigraph::plus(const Multidigraph& other) const {
  if (other.n_ != n_) throw std::invalid_argument("Multidigraph::plus: size mismatch");
  Multidigraph result = *this;
  for (int u = 0; u < n_; ++u)
    for (const auto& [v, m] : other.out_[u]) result.add_edge(u, v, m);
  return result;
}

std::string Multidigraph::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  auto es = nlohmann::json::array();
  for (const auto& [u, v, m] : edges()) es.push_back({u, v, m});
  j["edges"] = es;
  return j.dump();
}

Multidigraph Multidigraph::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Multidigraph g(j.at("n").get<int>());
  for (const auto& e : j.at("edges")) {
    int m = e.size() > 2 ? e[2].get<int>() : 1;
    g.add_edge(e[0].get<int>(), e[1].get<int>(), m);
  }
  return g;
}

BipartitePair::BipartitePair(int na, int nb) : na_(na), nb_(nb), adj_(na), radj_(nb) {
  if (na <= 0 || nb <= 0) throw std::invalid_argument("BipartitePair: classes must be nonempty");
}

void BipartitePair::add_edge(int a, int b) {
  if (a < 0 || a >= na_ || b < 0 || b >= nb_)
    throw std::out_of_range("BipartitePair: endpoint outside declared class");
  auto& row = adj_[a];
  auto it = std::lower_bound(row.begin(), row.end(), b);
  if (it != row.end() && *it == b) return;  // simple graph
  row.insert(it, b);
  auto& col = radj_[b];
  col.insert(std::lower_bound(col.begin(), col.end(), a), a);
}

void BipartitePair::remove_edge(int a, int b) {
  auto& row = adj_[a];
  auto it = std::lower_bound(row.begin(), row.end(), b);
  if (it == row.end() || *it != b) return;
  row.erase(it);
  auto& col = radj_[b];
  col.erase(std::lower_bound(col.begin(), col.end(), a));
}

bool BipartitePair::has_edge(int a, int b) const {
  if (a < 0 || a >= na_ || b < 0 || b >= nb_) return false;
  const auto& row = adj_[a];
  return std::binary_search(row.begin(), row.end(), b);
}

long long BipartitePair::edge_count() const {
  long long total = 0;
  for (const auto& row : adj_) total += static_cast<long long>(row.size());
  return total;
}

std::vector<std::pair<int, int>> BipartitePair::edges() const {
  std::vector<std::pair<int, int>> es;
  for (int a = 0; a < na_; ++a)
    for (int b : adj_[a]) es.emplace_back(a, b);
  return es;
}

std::string BipartitePair::to_json() const {
  nlohmann::json j;
  j["left"] = na_;
  j["right"] = nb_;
  auto es = nlohmann::json::array();
  for (const auto& [a, b] : edges()) es.push_back({a, b});
  j["edges"] = es;
  return j.dump();
}

BipartitePair BipartitePair::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  BipartitePair p(j.at("left").get<int>(), j.at("right").get<int>());
  for (const auto& e : j.at("edges")) p.add_edge(e[0].get<int>(), e[1].get<int>());
  return p;
}

OneFactor OneFactor::from_successor(std::vector<Vertex> succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> seen(n, 0);
  for (int v = 0; v < n; ++v) {
    if (succ[v] < 0 || succ[v] >= n) throw std::invalid_argument("OneFactor: successor out of range");
    if (succ[v] == v) throw std::invalid_argument("OneFactor: fixed point (loop) not allowed");
    if (seen[succ[v]]++) throw std::invalid_argument("OneFactor: successor map is not a bijection");
  }
  OneFactor f;
  f.succ_ = std::move(succ);
  std::vector<char> visited(n, 0);
  for (int v = 0; v < n; ++v) {
    if (visited[v]) continue;
    std::vector<Vertex> cycle;
    int x = v;
    while (!visited[x]) {
      visited[x] = 1;
      cycle.push_back(x);
      x = f.succ_[x];
    }
    f.cycles_.push_back(std::move(cycle));
  }
  return f;
}

Multidigraph OneFactor::to_graph() const {
  Multidigraph g(vertex_count());
  for (int v = 0; v < vertex_count(); ++v) g.add_edge(v, succ_[v]);
  return g;
}

OneFactor cycle_decomposition(const std::vector<Vertex>& successor) {
  return OneFactor::from_successor(successor);
}

BlowUp blow_up(const Multidigraph& R, int r) {
  if (r < 1) throw std::invalid_argument("blow_up: r must be >= 1");
  const int L = R.vertex_count();
  BlowUp result{Multidigraph(L * r), std::vector<int>(L * r)};
  for (int x = 0; x < L; ++x)
    for (int j = 0; j < r; ++j) result.cluster_of[x * r + j] = x;
  for (const auto& [x, y, mult] : R.edges()) {
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) result.graph.add_edge(x * r + j, y * r + k, mult);
  }
  return result;
}

bool winds_around(const Multidigraph& G, const std::vector<int>& cycle_order,
                  const std::vector<int>& assignment) {
  const int k = static_cast<int>(cycle_order.size());
  std::map<int, int> pos;
  for (int i = 0; i < k; ++i) pos[cycle_order[i]] = i;
  for (const auto& [u, v, m] : G.edges()) {
    if (assignment[u] < 0 || assignment[v] < 0)
      throw std::invalid_argument("winds_around: edge endpoint has no cluster assignment");
    auto pu = pos.find(assignment[u]);
    auto pv = pos.find(assignment[v]);
    if (pu == pos.end() || pv == pos.end()) return false;
    if ((pu->second + 1) % k != pv->second) return false;
  }
  return true;
}

}  // namespace hamdec
