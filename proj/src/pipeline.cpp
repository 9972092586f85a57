#include "hamdec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hamdec/derandom.hpp"
#include "hamdec/expander.hpp"
#include "hamdec/factorflow.hpp"
#include "hamdec/hammerge.hpp"
#include "hamdec/regularity.hpp"
#include "hamdec/rng.hpp"
#include "hamdec/unwind.hpp"
#include "json.hpp"

namespace hamdec {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

Rational json_rational(const nlohmann::json& j) { return Rational::parse(j.get<std::string>()); }

}  // namespace

void PipelineConfig::validate() const {
  if (s < 2 || s % 2 != 0) throw std::invalid_argument("PipelineConfig: s must be even");
  if (!is_prime(p) || p % 2 == 0) throw std::invalid_argument("PipelineConfig: p must be an odd prime");
  for (const Rational* r : {&beta, &gamma, &d, &xi, &eps, &eps_prime, &nu, &tau})
    if (!(Rational(0) < *r && *r < Rational(1)))
      throw std::invalid_argument("PipelineConfig: parameters must lie in (0,1)");
}

std::string PipelineConfig::to_json() const {
  nlohmann::json j;
  j["s"] = s;
  j["p"] = p;
  j["beta"] = beta.str();
  j["gamma"] = gamma.str();
  j["d"] = d.str();
  j["xi"] = xi.str();
  j["eps_tilde"] = eps_tilde.str();
  j["eps"] = eps.str();
  j["eps_prime"] = eps_prime.str();
  j["eps_s"] = eps_s.str();
  j["eps_p"] = eps_p.str();
  j["eps_2p"] = eps_2p.str();
  j["eta"] = eta.str();
  j["nu"] = nu.str();
  j["tau"] = tau.str();
  j["seed"] = seed;
  j["ham_budget"] = ham_budget;
  j["merge_retries"] = merge_retries;
  j["slice_retries"] = slice_retries;
  j["min_mp"] = min_mp;
  j["max_clusters"] = max_clusters;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  PipelineConfig c;
  if (j.contains("s")) c.s = j["s"].get<int>();
  if (j.contains("p")) c.p = j["p"].get<int>();
  auto rat = [&](const char* key, Rational& out) {
    if (j.contains(key)) out = json_rational(j[key]);
  };
  rat("beta", c.beta);
  rat("gamma", c.gamma);
  rat("d", c.d);
  rat("xi", c.xi);
  rat("eps_tilde", c.eps_tilde);
  rat("eps", c.eps);
  rat("eps_prime", c.eps_prime);
  rat("eps_s", c.eps_s);
  rat("eps_p", c.eps_p);
  rat("eps_2p", c.eps_2p);
  rat("eta", c.eta);
  rat("nu", c.nu);
  rat("tau", c.tau);
  if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  if (j.contains("ham_budget")) c.ham_budget = j["ham_budget"].get<long long>();
  if (j.contains("merge_retries")) c.merge_retries = j["merge_retries"].get<int>();
  if (j.contains("slice_retries")) c.slice_retries = j["slice_retries"].get<int>();
  if (j.contains("min_mp")) c.min_mp = j["min_mp"].get<int>();
  if (j.contains("max_clusters")) c.max_clusters = j["max_clusters"].get<int>();
  c.validate();
  return c;
}

namespace {

// k-regular random-looking bipartite graph: a circulant with a random offset
// set, conjugated by random permutations of both classes. Simple and exactly
// k-regular on both sides for any k <= m.
BipartitePair regular_bipartite(int m, int k, Rng& rng) {
  if (k > m) throw std::invalid_argument("regular_bipartite: k > m");
  std::vector<int> offsets = rng.permutation(m);
  offsets.resize(k);
  std::vector<int> sigma = rng.permutation(m), tau = rng.permutation(m);
  BipartitePair pair(m, m);
  for (int a = 0; a < m; ++a)
    for (int j : offsets) pair.add_edge(sigma[a], tau[(a + j) % m]);
  return pair;
}

// Union of k random cyclic permutations with distinct support edges.
Multidigraph random_regular_digraph(int L, int k, Rng& rng) {
  if (k >= L) throw std::invalid_argument("random_regular_digraph: need degree < L");
  const int retries = 2000;
  for (int attempt = 0; attempt < retries; ++attempt) {
    Multidigraph g(L);
    bool ok = true;
    for (int t = 0; t < k && ok; ++t) {
      std::vector<int> succ = rng.cyclic_permutation(L);
      for (int v = 0; v < L && ok; ++v)
        if (g.multiplicity(v, succ[v]) > 0) ok = false;
      if (ok)
        for (int v = 0; v < L; ++v) g.add_edge(v, succ[v]);
    }
    if (ok) return g;
  }
  throw std::runtime_error("random_regular_digraph: rejection sampling exhausted");
}

std::vector<std::vector<std::pair<int, int>>> peel_pair_matchings(BipartitePair pair) {
  std::vector<std::vector<std::pair<int, int>>> out;
  for (;;) {
    // maximum matching on the residual
    const int na = pair.left_size(), nb = pair.right_size();
    std::vector<int> ml(na, -1), mr(nb, -1);
    std::function<bool(int, std::vector<char>&)> aug = [&](int a, std::vector<char>& vis) {
      for (int b : pair.neighbours_left(a)) {
        if (vis[b]) continue;
        vis[b] = 1;
        if (mr[b] < 0 || aug(mr[b], vis)) {
          ml[a] = b;
          mr[b] = a;
          return true;
        }
      }
      return false;
    };
    int size = 0;
    for (int a = 0; a < na; ++a) {
      std::vector<char> vis(nb, 0);
      if (aug(a, vis)) ++size;
    }
    if (size == 0) break;
    std::vector<std::pair<int, int>> matching;
    for (int a = 0; a < na; ++a)
      if (ml[a] >= 0) {
        matching.emplace_back(a, ml[a]);
        pair.remove_edge(a, ml[a]);
      }
    out.push_back(std::move(matching));
  }
  return out;
}

BipartitePair pair_from_matchings(int na, int nb,
                                  const std::vector<std::vector<std::pair<int, int>>>& ms,
                                  int from, int count) {
  BipartitePair pair(na, nb);
  for (int t = from; t < from + count && t < static_cast<int>(ms.size()); ++t)
    for (const auto& [a, b] : ms[t]) pair.add_edge(a, b);
  return pair;
}

void merge_into(PairHandle& dst, const BipartitePair& src) {
  for (const auto& [a, b] : src.edges()) dst.pair.add_edge(a, b);
}

}  // namespace

Instance generate_instance(InstanceKind kind, const GenParams& params, uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  switch (kind) {
    case InstanceKind::Blowup: {
      const int L = params.L, m = params.m;
      if (L < 2 || m < 4) throw std::invalid_argument("generate_instance: blowup needs L >= 2, m >= 4");
      Multidigraph R = params.reduced ? *params.reduced
                                      : random_regular_digraph(L, params.reduced_degree, rng);
      const int k_pair = static_cast<int>((params.density * Rational(m)).floor() +
                                          (rng.unit() < std::fmod(params.density.to_double() * m, 1.0) ? 1 : 0));
      inst.graph = Multidigraph(L * m);
      for (const auto& [u, v, mult] : R.edges()) {
        BipartitePair pair = regular_bipartite(m, k_pair, rng);
        for (const auto& [a, b] : pair.edges()) inst.graph.add_edge(u * m + a, v * m + b);
      }
      for (int c = 0; c < L; ++c) {
        std::vector<int> cluster(m);
        std::iota(cluster.begin(), cluster.end(), c * m);
        inst.partition.clusters.push_back(std::move(cluster));
      }
      inst.reduced = R;
      break;
    }
    case InstanceKind::Tournament: {
      const int n = params.n;
      if (n < 3 || n % 2 == 0) throw std::invalid_argument("generate_instance: tournament needs odd n >= 3");
      inst.graph = Multidigraph(n);
      for (int i = 0; i < n; ++i)
        for (int j = 1; j <= (n - 1) / 2; ++j) inst.graph.add_edge(i, (i + j) % n);
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      inst.partition.clusters.push_back(all);
      inst.reduced = Multidigraph(1);
      break;
    }
    case InstanceKind::Quasirandom: {
      const int n = params.n;
      inst.graph = Multidigraph(n);
      const double alpha = params.alpha.to_double();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && rng.bernoulli(alpha)) inst.graph.add_edge(i, j);
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      inst.partition.clusters.push_back(all);
      inst.reduced = Multidigraph(1);
      break;
    }
  }
  inst.partition.validate();
  return inst;
}

namespace {

// Pair between two clusters of G, restricted to the given vertex lists.
PairHandle cluster_pair(const Multidigraph& G, const std::vector<Vertex>& left,
                        const std::vector<Vertex>& right) {
  PairHandle handle;
  handle.left_ids = left;
  handle.right_ids = right;
  handle.pair = BipartitePair(static_cast<int>(left.size()), static_cast<int>(right.size()));
  std::map<Vertex, int> rindex;
  for (size_t i = 0; i < right.size(); ++i) rindex[right[i]] = static_cast<int>(i);
  for (size_t i = 0; i < left.size(); ++i)
    for (const auto& [w, mult] : G.out(left[i])) {
      auto it = rindex.find(w);
      if (it != rindex.end()) handle.pair.add_edge(static_cast<int>(i), it->second);
    }
  return handle;
}

}  // namespace

ReduceResult reduce_and_regularize(const Multidigraph& G, const ClusterPartition& partition_in,
                                   const Multidigraph& support, const PipelineConfig& config) {
  config.validate();
  ReduceResult result;
  result.partition = partition_in;
  result.partition.validate();
  const int L = result.partition.cluster_count();
  if (L < 2) throw std::invalid_argument("reduce_and_regularize: need at least two clusters");
  if (L > config.max_clusters)
    throw std::invalid_argument("reduce_and_regularize: cluster count above configured cap");
  const int n = G.vertex_count();

  // pair densities (exact) on the support edges
  auto compute_density = [&](int u, int v) {
    long long edges = 0;
    std::set<int> right(result.partition.clusters[v].begin(), result.partition.clusters[v].end());
    for (int x : result.partition.clusters[u])
      for (const auto& [w, mult] : G.out(x))
        if (right.count(w)) ++edges;
    long long mm = static_cast<long long>(result.partition.clusters[u].size()) *
                   result.partition.clusters[v].size();
    return Rational(edges, mm);
  };
  result.reduced.pair_density.assign(L, std::vector<Rational>(L, Rational(0)));
  result.reduced.r_beta = Multidigraph(L);
  for (const auto& [u, v, mult] : support.edges()) {
    Rational dij = compute_density(u, v);
    result.reduced.pair_density[u][v] = dij;
    if (dij < config.d) continue;  // below the density threshold: not a reduced edge
    long long copies = (dij / config.beta).floor();
    if (copies > 0) result.reduced.r_beta.add_edge(u, v, static_cast<int>(copies));
  }
  if (result.reduced.r_beta.edge_count() == 0)
    throw std::runtime_error("reduce_and_regularize: no reduced edges at these parameters");

  int m = result.partition.cluster_size();
  int c_e = static_cast<int>((config.beta * Rational(m)).floor());
  if (c_e < 1) throw std::runtime_error("reduce_and_regularize: beta*m < 1");

  // Slice every reduced edge into copies of c_e matchings; scan goodness.
  struct EdgeData {
    int u, v, copies;
    PairHandle handle;
    std::vector<std::vector<std::pair<int, int>>> matchings;
  };
  std::vector<EdgeData> edge_data;
  auto slice_all = [&]() {
    edge_data.clear();
    for (const auto& [u, v, copies] : result.reduced.r_beta.edges()) {
      EdgeData ed;
      ed.u = u;
      ed.v = v;
      ed.copies = copies;
      ed.handle = cluster_pair(G, result.partition.clusters[u], result.partition.clusters[v]);
      ed.matchings = peel_pair_matchings(ed.handle.pair);
      edge_data.push_back(std::move(ed));
    }
  };
  slice_all();

  // good-pair rule: (x, E) is bad when the copy degree misses (beta +- 2 eps~) m
  {
    m = result.partition.cluster_size();
    Rational lo = (config.beta - Rational(2) * config.eps_tilde) * Rational(m);
    Rational hi = (config.beta + Rational(2) * config.eps_tilde) * Rational(m);
    std::vector<int> bad_count(n, 0);
    std::vector<int> incident(L, 0);
    for (const auto& ed : edge_data) {
      incident[ed.u] += ed.copies;
      incident[ed.v] += ed.copies;
    }
    for (const auto& ed : edge_data) {
      for (int copy = 0; copy < ed.copies; ++copy) {
        std::vector<int> degl(m, 0), degr(m, 0);
        for (int t = copy * c_e; t < (copy + 1) * c_e && t < static_cast<int>(ed.matchings.size()); ++t)
          for (const auto& [a, b] : ed.matchings[t]) {
            ++degl[a];
            ++degr[b];
          }
        for (int a = 0; a < m; ++a)
          if (!(lo <= Rational(degl[a]) && Rational(degl[a]) <= hi))
            ++bad_count[ed.handle.left_ids[a]];
        for (int b = 0; b < m; ++b)
          if (!(lo <= Rational(degr[b]) && Rational(degr[b]) <= hi))
            ++bad_count[ed.handle.right_ids[b]];
      }
    }
    int evict_per_cluster = 0;
    std::vector<std::vector<int>> bad_of_cluster(L);
    for (int cidx = 0; cidx < L; ++cidx) {
      for (int x : result.partition.clusters[cidx]) {
        // x is bad when it forms a bad pair with more than xi |E(A)| copies
        if (Rational(bad_count[x]) > config.xi * Rational(incident[cidx]))
          bad_of_cluster[cidx].push_back(x);
      }
      evict_per_cluster = std::max(evict_per_cluster, static_cast<int>(bad_of_cluster[cidx].size()));
    }
    // refinement-regime divisibility trim happens here too
    int m1 = m - evict_per_cluster;
    const int sp = config.s * config.p;
    const int m2_candidate = m1 - (m1 % (2 * sp));
    bool refine = m2_candidate > 0 && (m2_candidate / sp) >= config.min_mp &&
                  config.kappa(m2_candidate / sp) >= 1;
    int extra = refine ? (m1 % (2 * sp)) : 0;
    if (evict_per_cluster + extra > 0) {
      for (int cidx = 0; cidx < L; ++cidx) {
        std::set<int> evict(bad_of_cluster[cidx].begin(), bad_of_cluster[cidx].end());
        for (int x : result.partition.clusters[cidx]) {
          if (static_cast<int>(evict.size()) >= evict_per_cluster + extra) break;
          evict.insert(x);
        }
        std::vector<int> kept;
        for (int x : result.partition.clusters[cidx])
          if (!evict.count(x)) kept.push_back(x);
        result.partition.clusters[cidx] = kept;
        for (int x : evict) {
          result.partition.exceptional.push_back(x);
          result.reduced.evicted.push_back(x);
        }
      }
      std::sort(result.partition.exceptional.begin(), result.partition.exceptional.end());
      result.partition.validate();
      slice_all();  // pairs shrank; re-peel
    }
  }
  m = result.partition.cluster_size();
  c_e = static_cast<int>((config.beta * Rational(m)).floor());
  if (c_e < 1) throw std::runtime_error("reduce_and_regularize: beta*m < 1 after eviction");

  // r~ = (alpha~ - gamma) L / beta with alpha~ from the minimum semidegree
  result.reduced.alpha_tilde = Rational(G.min_semidegree(), n);
  long long r_tilde = ((result.reduced.alpha_tilde - config.gamma) * Rational(L) / config.beta).floor();
  r_tilde = std::min<long long>(r_tilde, result.reduced.r_beta.min_semidegree());
  if (r_tilde < 1)
    throw std::runtime_error("reduce_and_regularize: r_tilde < 1 (instance too sparse for these parameters)");
  result.reduced.r_tilde = static_cast<int>(r_tilde);

  // W removal: exact degrees d(U) - r~ via flow on R(beta)
  DegreePrescription w_demands;
  w_demands.out_demand.resize(L);
  w_demands.in_demand.resize(L);
  for (int U = 0; U < L; ++U) {
    w_demands.out_demand[U] = result.reduced.r_beta.out_degree(U) - result.reduced.r_tilde;
    w_demands.in_demand[U] = result.reduced.r_beta.in_degree(U) - result.reduced.r_tilde;
    if (w_demands.out_demand[U] < 0 || w_demands.in_demand[U] < 0)
      throw std::runtime_error("reduce_and_regularize: r_tilde exceeds a cluster degree");
  }
  PrescribedResult w_flow = prescribed_subgraph(result.reduced.r_beta, w_demands);
  if (!w_flow.feasible())
    throw std::runtime_error("reduce_and_regularize: W flow infeasible (instance not expanding enough)");
  result.reduced.w_removal = *w_flow.subgraph;
  Multidigraph remainder = result.reduced.r_beta.minus(result.reduced.w_removal);

  // 1-factorization, Hamilton factors first
  {
    Multidigraph work = remainder;
    int peeled = 0;
    while (peeled < result.reduced.r_tilde) {
      Multidigraph support_rem(L);
      for (const auto& [u, v, mult] : work.edges()) support_rem.add_edge(u, v);
      HamiltonResult ham = find_hamilton(support_rem, config.ham_budget, config.seed + peeled);
      if (!ham.cycle) break;
      const auto& cyc = *ham.cycle;
      std::vector<Vertex> succ(L);
      for (size_t i = 0; i < cyc.size(); ++i) succ[cyc[i]] = cyc[(i + 1) % cyc.size()];
      result.reduced.factors.push_back(OneFactor::from_successor(succ));
      for (int v = 0; v < L; ++v) work.remove_edge(v, succ[v]);
      ++peeled;
    }
    result.reduced.hamilton_factors = peeled;
    int rest = result.reduced.r_tilde - peeled;
    if (rest > 0) {
      auto rest_factors = one_factorize(work, rest);
      for (auto& f : rest_factors) result.reduced.factors.push_back(std::move(f));
    }
  }

  // copy assignment and the six-way reservoir split
  const int count_h = static_cast<int>(std::lround(config.gamma.to_double() * c_e));
  for (auto& ed : edge_data) {
    const int total_matchings = static_cast<int>(ed.matchings.size());
    int next_copy = 0;
    const int w_mult = result.reduced.w_removal.multiplicity(ed.u, ed.v);
    const int factor_copies = ed.copies - w_mult;
    auto key = std::make_pair(ed.u, ed.v);
    auto ensure = [&](std::map<std::pair<int, int>, PairHandle>& target) -> PairHandle& {
      auto it = target.find(key);
      if (it == target.end()) {
        PairHandle fresh;
        fresh.left_ids = ed.handle.left_ids;
        fresh.right_ids = ed.handle.right_ids;
        fresh.pair = BipartitePair(m, m);
        it = target.emplace(key, std::move(fresh)).first;
      }
      return it->second;
    };
    // factor copies: assign to the factors that traverse this edge, in order
    for (int t = 0; t < result.reduced.r_tilde; ++t) {
      if (result.reduced.factors[t].next(ed.u) != ed.v) continue;
      if (next_copy >= factor_copies)
        throw std::runtime_error("reduce_and_regularize: copy accounting failed");
      int base = next_copy * c_e;
      ++next_copy;
      // per copy: 5 reservoir shares of count_h matchings, rest to G*
      int h_total = std::min(5 * count_h, c_e);
      int g_count = c_e - h_total;
      PairHandle gh;
      gh.left_ids = ed.handle.left_ids;
      gh.right_ids = ed.handle.right_ids;
      gh.pair = pair_from_matchings(m, m, ed.matchings, base, g_count);
      int offset = base + g_count;
      merge_into(ensure(result.reservoirs.h0p), pair_from_matchings(m, m, ed.matchings, offset, count_h));
      merge_into(ensure(result.reservoirs.h0m),
                 pair_from_matchings(m, m, ed.matchings, offset + count_h, count_h));
      merge_into(ensure(result.reservoirs.h1p),
                 pair_from_matchings(m, m, ed.matchings, offset + 2 * count_h, count_h));
      merge_into(ensure(result.reservoirs.h1m),
                 pair_from_matchings(m, m, ed.matchings, offset + 3 * count_h, count_h));
      merge_into(ensure(result.reservoirs.h2),
                 pair_from_matchings(m, m, ed.matchings, offset + 4 * count_h, count_h));
      result.reservoirs.g_star.emplace(std::make_tuple(t, ed.u, ed.v), std::move(gh));
    }
    // W copies and floor leftovers feed the residual pool
    int pool_from = factor_copies * c_e;
    merge_into(ensure(result.reservoirs.pool),
               pair_from_matchings(m, m, ed.matchings, pool_from, total_matchings - pool_from));
  }
  return result;
}

namespace {

PairHandle restrict_handle(const PairHandle& src, const std::vector<Vertex>& left,
                           const std::vector<Vertex>& right) {
  PairHandle out;
  out.left_ids = left;
  out.right_ids = right;
  out.pair = BipartitePair(static_cast<int>(left.size()), static_cast<int>(right.size()));
  std::map<Vertex, int> lidx, ridx;
  for (size_t i = 0; i < src.left_ids.size(); ++i) lidx[src.left_ids[i]] = static_cast<int>(i);
  for (size_t i = 0; i < src.right_ids.size(); ++i) ridx[src.right_ids[i]] = static_cast<int>(i);
  for (size_t a = 0; a < left.size(); ++a) {
    auto la = lidx.find(left[a]);
    if (la == lidx.end()) continue;
    for (int b : src.pair.neighbours_left(la->second)) {
      Vertex gb = src.right_ids[b];
      auto rb = std::lower_bound(right.begin(), right.end(), gb);
      if (rb != right.end() && *rb == gb)
        out.pair.add_edge(static_cast<int>(a), static_cast<int>(rb - right.begin()));
    }
  }
  return out;
}

}  // namespace

std::vector<Slice> build_slices(const Instance& instance, const ReduceResult& reduced,
                                const PipelineConfig& config) {
  const ClusterPartition& partition = reduced.partition;
  const int L = partition.cluster_count();
  const int m = partition.cluster_size();
  const int n = instance.graph.vertex_count();
  const int sp = config.s * config.p;
  const bool refine = (m % sp == 0) && (m / sp) >= config.min_mp && config.kappa(m / sp) >= 1;

  std::vector<Slice> slices;

  if (!refine) {
    // primary-cluster granularity: one slice per reduced factor
    const int kappa = config.kappa(m);
    // red-edge source: G edges incident to the exceptional set, shared out
    // across slices on first use
    std::vector<char> exceptional(n, 0);
    for (int x : partition.exceptional) exceptional[x] = 1;
    std::vector<int> cluster_of(n, -1);
    for (int c = 0; c < L; ++c)
      for (int v : partition.clusters[c]) cluster_of[v] = c;
    // per exceptional vertex: available out/in edges into clustered vertices
    std::map<Vertex, std::vector<Vertex>> red_out, red_in;
    for (int x : partition.exceptional) {
      for (const auto& [y, mult] : instance.graph.out(x))
        if (cluster_of[y] >= 0) red_out[x].push_back(y);
      for (const auto& [y, mult] : instance.graph.in(x))
        if (cluster_of[y] >= 0) red_in[x].push_back(y);
    }
    std::set<std::pair<Vertex, Vertex>> red_used;

    for (int t = 0; t < reduced.reduced.r_tilde; ++t) {
      Slice slice;
      slice.index = t;
      slice.t = t;
      slice.cluster_factor = reduced.reduced.factors[t];
      slice.cluster_vertices = partition.clusters;
      slice.kappa = kappa;
      slice.m_p = m;
      slice.refined = false;
      slice.in_red.assign(L, 0);
      slice.out_red.assign(L, 0);
      for (const auto& [u, v, mult] : slice.cluster_factor.to_graph().edges()) {
        auto it = reduced.reservoirs.g_star.find(std::make_tuple(t, u, v));
        if (it == reduced.reservoirs.g_star.end()) {
          slice.failure = "missing g_star pair for factor edge";
          break;
        }
        slice.pairs[{u, v}] = it->second;
      }
      if (!slice.failure.empty()) {
        slices.push_back(std::move(slice));
        continue;
      }

      if (slice.cluster_factor.cycles().size() > 1) {
        // bridge vertices would need kappa-deep H0 reservoirs; at this
        // granularity we fail the slice instead (see the run report)
        slice.failure = "reduced factor has " +
                        std::to_string(slice.cluster_factor.cycles().size()) +
                        " cycles; bridge construction unavailable at primary granularity";
        slices.push_back(std::move(slice));
        continue;
      }

      if (!partition.exceptional.empty()) {
        // anchor pairs (A, succ(A)) on the factor cycle; x gets kappa
        // out-edges into the in-red half of succ(A) and kappa in-edges from
        // the out-red half of A, which balances d_i+(A) = d_i-(succ(A))
        const auto& cyc = slice.cluster_factor.cycles()[0];
        const int half = m / 2;
        const int red_parity = t % 2;
        auto red_half = [&](int cluster) {
          std::vector<Vertex> ids;
          const auto& list = slice.cluster_vertices[cluster];
          for (int i = red_parity * half; i < (red_parity + 1) * half && i < m; ++i)
            ids.push_back(list[i]);
          return ids;
        };
        const long long red_cap = std::max<long long>(
            1, (Rational(1) * config.beta1() * Rational(m)).floor() / 4);  // per-target cap
        bool ok = true;
        int anchor_rot = t % static_cast<int>(cyc.size());
        std::map<Vertex, int> target_load;
        for (size_t xi = 0; xi < partition.exceptional.size() && ok; ++xi) {
          Vertex x = partition.exceptional[xi];
          int A = cyc[(anchor_rot + 2 * xi) % cyc.size()];
          int B = slice.cluster_factor.next(A);
          slice.out_red[A] = 1;
          slice.in_red[B] = 1;
          // kappa out-edges of x into the red half of B
          int placed = 0;
          std::set<Vertex> bhalf;
          for (Vertex y : red_half(B)) bhalf.insert(y);
          for (Vertex y : red_out[x]) {
            if (placed >= kappa) break;
            if (!bhalf.count(y) || red_used.count({x, y})) continue;
            if (target_load[y] >= red_cap) continue;
            red_used.insert({x, y});
            slice.red_edges.emplace_back(x, y);
            ++target_load[y];
            ++placed;
          }
          if (placed < kappa) ok = false;
          // kappa in-edges from the red half of A
          placed = 0;
          std::set<Vertex> ahalf;
          for (Vertex y : red_half(A)) ahalf.insert(y);
          for (Vertex y : red_in[x]) {
            if (placed >= kappa) break;
            if (!ahalf.count(y) || red_used.count({y, x})) continue;
            if (target_load[y] >= red_cap) continue;
            red_used.insert({y, x});
            slice.red_edges.emplace_back(y, x);
            ++target_load[y];
            ++placed;
          }
          if (placed < kappa) ok = false;
        }
        if (!ok) {
          slice.failure = "exceptional-set incorporation starved (kappa red edges unavailable)";
          slices.push_back(std::move(slice));
          continue;
        }
        slice.exceptional = partition.exceptional;
      }
      slices.push_back(std::move(slice));
    }
    return slices;
  }

  // refined regime: s/p double unwinding over refined partitions
  std::vector<const Multidigraph*> graphs{&instance.graph};
  ClusterPartition ps = uniform_refinement(partition, config.s, graphs, config.eps_s, config.seed,
                                           config.slice_retries);
  ClusterPartition pp = uniform_refinement(ps, config.p, graphs, config.eps_p, config.seed + 1,
                                           config.slice_retries);
  const int m_p = m / sp;
  const int kappa = config.kappa(m_p);

  int index = 0;
  for (int t = 0; t < reduced.reduced.r_tilde; ++t) {
    DoubleUnwinding unwound =
        double_unwind(reduced.reduced.factors[t], config.s, config.p, config.seed + 97 * t);
    for (int a = 0; a < config.s - 1; ++a) {
      // clean/red marking over the s-level factor
      RedScheme scheme;
      scheme.s = config.s;
      scheme.p = config.p;
      scheme.t = t + 1;
      scheme.f = a + 1;
      scheme.big_f = std::max(1, (config.s - 1) / 2);
      scheme.primary_of.resize(L * config.s);
      scheme.index_in_primary.resize(L * config.s);
      for (int u = 0; u < L * config.s; ++u) {
        scheme.primary_of[u] = u / config.s;
        scheme.index_in_primary[u] = u % config.s + 1;
      }
      RedMarking marking = mark_clean_and_red(unwound.s_factors[a], scheme);

      for (int b = 0; b < config.p - 1; ++b) {
        Slice slice;
        slice.index = index++;
        slice.t = t;
        slice.refined = true;
        slice.m_p = m_p;
        slice.kappa = kappa;
        slice.cluster_factor = unwound.p_factors[a][b];
        const int P = L * sp;
        slice.cluster_vertices.resize(P);
        for (int c = 0; c < P; ++c) slice.cluster_vertices[c] = pp.clusters[c];
        slice.in_red.assign(P, 0);
        slice.out_red.assign(P, 0);
        for (int u = 0; u < L * config.s; ++u) {
          for (int q = 0; q < config.p; ++q) {
            if (marking.in_red[u]) slice.in_red[u * config.p + q] = 1;
            if (marking.out_red[u]) slice.out_red[u * config.p + q] = 1;
          }
        }
        // per-factor-edge pair graphs: restrict the primary-level G* pair
        for (const auto& [pu, pv, mult] : slice.cluster_factor.to_graph().edges()) {
          int u_primary = pu / sp, v_primary = pv / sp;
          auto it = reduced.reservoirs.g_star.find(std::make_tuple(t, u_primary, v_primary));
          if (it == reduced.reservoirs.g_star.end()) {
            slice.failure = "missing g_star pair for refined factor edge";
            break;
          }
          slice.pairs[{pu, pv}] =
              restrict_handle(it->second, slice.cluster_vertices[pu], slice.cluster_vertices[pv]);
        }
        if (slice.failure.empty() && !partition.exceptional.empty())
          slice.failure = "exceptional-set incorporation not supported in refined regime at desk scale";
        if (slice.failure.empty() && slice.cluster_factor.cycles().size() !=
                                         reduced.reduced.factors[t].cycles().size())
          slice.failure = "unexpected cycle structure after double unwinding";
        if (slice.failure.empty() && reduced.reduced.factors[t].cycles().size() > 1)
          slice.failure = "bridge construction unavailable at desk reservoirs";
        slices.push_back(std::move(slice));
      }
    }
  }
  return slices;
}

SliceOutcome decompose_slice(Slice& slice, Reservoirs& reservoirs, const Multidigraph& G,
                             const PipelineConfig& config) {
  SliceOutcome outcome;
  outcome.slice_index = slice.index;
  if (!slice.ok()) {
    outcome.failure = slice.failure;
    return outcome;
  }
  const int n = G.vertex_count();
  const int P = static_cast<int>(slice.cluster_vertices.size());

  // H3 split: gamma^2 share of every slice pair (usually empty at desk m)
  std::map<std::pair<int, int>, PairHandle> h3;
  {
    const double g2 = config.gamma.to_double() * config.gamma.to_double();
    for (auto& [key, handle] : slice.pairs) {
      int max_deg = 0;
      for (int a = 0; a < handle.pair.left_size(); ++a)
        max_deg = std::max(max_deg, handle.pair.degree_left(a));
      int take = static_cast<int>(std::lround(g2 * max_deg));
      if (take <= 0) continue;
      auto matchings = peel_pair_matchings(handle.pair);
      if (static_cast<int>(matchings.size()) <= take) continue;
      PairHandle h3h;
      h3h.left_ids = handle.left_ids;
      h3h.right_ids = handle.right_ids;
      h3h.pair = pair_from_matchings(handle.pair.left_size(), handle.pair.right_size(), matchings,
                                     0, take);
      PairHandle rest;
      rest.left_ids = handle.left_ids;
      rest.right_ids = handle.right_ids;
      rest.pair = pair_from_matchings(handle.pair.left_size(), handle.pair.right_size(), matchings,
                                      take, static_cast<int>(matchings.size()) - take);
      for (const auto& [a, b] : h3h.pair.edges()) handle.pair.remove_edge(a, b);
      h3[key] = std::move(h3h);
    }
  }

  // red degree tallies per vertex and (B2'') check
  std::vector<int> red_out_deg(n, 0), red_in_deg(n, 0);
  std::vector<char> exceptional(n, 0);
  for (Vertex x : slice.exceptional) exceptional[x] = 1;
  std::vector<int> cluster_of(n, -1);
  for (int c = 0; c < P; ++c)
    for (Vertex v : slice.cluster_vertices[c]) cluster_of[v] = c;
  for (const auto& [u, v] : slice.red_edges) {
    ++red_out_deg[u];
    ++red_in_deg[v];
  }
  {
    RedTally tally =
        red_tally(slice.red_edges, exceptional, cluster_of, slice.in_red, slice.out_red);
    std::vector<int> succ(P, -1);
    for (int c = 0; c < P; ++c) succ[c] = slice.cluster_factor.next(c);
    BalancingEdges none;
    int bad = check_balance_condition(tally, none, succ, P);
    if (bad >= 0) {
      // the anchor construction keeps red edges balanced; anything else is a
      // slice defect at this scale
      outcome.failure = "red edges unbalanced at cluster " + std::to_string(bad) +
                        " ((B2'') fails and desk reservoirs cannot realize a balancing sequence)";
      slice.failure = outcome.failure;
      return outcome;
    }
  }

  // kappa-exact flows per factor edge
  Multidigraph g_star(n);
  for (const auto& [key, handle] : slice.pairs) {
    const auto& [cu, cv] = key;
    std::vector<int> m_plus(handle.left_ids.size(), 0), m_minus(handle.right_ids.size(), 0);
    for (size_t i = 0; i < handle.left_ids.size(); ++i) m_plus[i] = red_out_deg[handle.left_ids[i]];
    for (size_t i = 0; i < handle.right_ids.size(); ++i) m_minus[i] = red_in_deg[handle.right_ids[i]];
    long long sum_p = std::accumulate(m_plus.begin(), m_plus.end(), 0LL);
    long long sum_m = std::accumulate(m_minus.begin(), m_minus.end(), 0LL);
    if (sum_p != sum_m) {
      outcome.failure = "pair " + std::to_string(cu) + "->" + std::to_string(cv) +
                        " demand imbalance (red accounting)";
      slice.failure = outcome.failure;
      return outcome;
    }
    PairSubgraphResult flow = superregular_prescribed(handle.pair, m_plus, m_minus, slice.kappa);
    if (!flow.feasible()) {
      outcome.failure = "kappa flow infeasible on pair " + std::to_string(cu) + "->" +
                        std::to_string(cv) + " (cut capacity " +
                        std::to_string(flow.cut->capacity) + " < demand " +
                        std::to_string(flow.cut->demand_total) + ")";
      slice.failure = outcome.failure;
      return outcome;
    }
    for (const auto& [a, b] : flow.subgraph->edges())
      g_star.add_edge(handle.left_ids[a], handle.right_ids[b]);
  }
  for (const auto& [u, v] : slice.red_edges) g_star.add_edge(u, v);

  // local relabeling of the slice vertex set
  std::vector<Vertex> vertices;
  for (const auto& cluster : slice.cluster_vertices)
    vertices.insert(vertices.end(), cluster.begin(), cluster.end());
  vertices.insert(vertices.end(), slice.exceptional.begin(), slice.exceptional.end());
  std::sort(vertices.begin(), vertices.end());
  std::vector<int> local_of(n, -1);
  for (size_t i = 0; i < vertices.size(); ++i) local_of[vertices[i]] = static_cast<int>(i);
  Multidigraph local(static_cast<int>(vertices.size()));
  for (const auto& [u, v, mult] : g_star.edges()) local.add_edge(local_of[u], local_of[v], mult);

  for (int i = 0; i < local.vertex_count(); ++i) {
    if (local.out_degree(i) != slice.kappa || local.in_degree(i) != slice.kappa) {
      outcome.failure = "assembled slice graph is not kappa-regular at vertex " +
                        std::to_string(vertices[i]);
      slice.failure = outcome.failure;
      return outcome;
    }
  }

  std::vector<OneFactor> factors = one_factorize(local, slice.kappa);
  outcome.factors_built = static_cast<int>(factors.size());

  // merge contexts per cluster cycle, with a rotating choice of black pairs
  struct CycleInfo {
    std::vector<int> cluster_ids;           // in cycle order
    std::vector<int> black_pairs;           // positions usable as J edges
  };
  std::vector<CycleInfo> cycles;
  for (const auto& cyc : slice.cluster_factor.cycles()) {
    CycleInfo info;
    info.cluster_ids = cyc;
    for (size_t j = 0; j < cyc.size(); ++j) {
      int cu = cyc[j], cv = cyc[(j + 1) % cyc.size()];
      if (slice.in_red[cu] || slice.out_red[cu] || slice.in_red[cv] || slice.out_red[cv]) continue;
      info.black_pairs.push_back(static_cast<int>(j));
    }
    if (info.black_pairs.empty()) {
      outcome.failure = "no black pair available on a cluster cycle";
      slice.failure = outcome.failure;
      return outcome;
    }
    cycles.push_back(std::move(info));
  }

  // combined reservoir views (H3 plus residual pool) per cycle position
  struct CombinedPair {
    BipartitePair pair{1, 1};
    std::vector<Vertex> left_ids, right_ids;
    int cu = -1, cv = -1;
  };
  std::map<std::pair<int, int>, CombinedPair> combined;  // (cycle idx, pair pos)
  auto combined_for = [&](int ci, int pos) -> CombinedPair& {
    auto key = std::make_pair(ci, pos);
    auto it = combined.find(key);
    if (it != combined.end()) return it->second;
    const auto& info = cycles[ci];
    int cu = info.cluster_ids[pos], cv = info.cluster_ids[(pos + 1) % info.cluster_ids.size()];
    CombinedPair cp;
    cp.cu = cu;
    cp.cv = cv;
    cp.left_ids = slice.cluster_vertices[cu];
    cp.right_ids = slice.cluster_vertices[cv];
    cp.pair = BipartitePair(static_cast<int>(cp.left_ids.size()),
                            static_cast<int>(cp.right_ids.size()));
    auto absorb = [&](const PairHandle& src) {
      PairHandle r = restrict_handle(src, cp.left_ids, cp.right_ids);
      for (const auto& [a, b] : r.pair.edges()) cp.pair.add_edge(a, b);
    };
    auto h3it = h3.find({cu, cv});
    if (h3it != h3.end()) absorb(h3it->second);
    // pool lives at primary granularity
    int sp = config.s * config.p;
    int pu = slice.refined ? cu / sp : cu;
    int pv = slice.refined ? cv / sp : cv;
    auto poolit = reservoirs.pool.find({pu, pv});
    if (poolit != reservoirs.pool.end()) absorb(poolit->second);
    return combined.emplace(key, std::move(cp)).first->second;
  };

  std::vector<std::pair<Vertex, Vertex>> globally_consumed;
  int factor_index = 0;
  for (const auto& factor : factors) {
    std::vector<MergeContext> contexts;
    std::vector<CombinedPair*> used_pairs;
    for (size_t ci = 0; ci < cycles.size(); ++ci) {
      const auto& info = cycles[ci];
      MergeContext ctx;
      for (int cid : info.cluster_ids) {
        std::vector<Vertex> local_cluster;
        for (Vertex v : slice.cluster_vertices[cid]) local_cluster.push_back(local_of[v]);
        ctx.clusters.push_back(std::move(local_cluster));
      }
      int pick = info.black_pairs[(factor_index + static_cast<int>(ci)) % info.black_pairs.size()];
      ctx.j_pairs = {pick};
      CombinedPair& cp = combined_for(static_cast<int>(ci), pick);
      used_pairs.push_back(&cp);
      ctx.pair_graph = [&cp, pick](int j) -> BipartitePair* {
        return j == pick ? &cp.pair : nullptr;
      };
      contexts.push_back(std::move(ctx));
    }

    FactorMergeResult merged = merge_factor(contexts, factor, config.ham_budget,
                                            config.seed + 1315423911ULL * (slice.index + 1) +
                                                factor_index,
                                            config.merge_retries);
    ++factor_index;
    if (!merged.ok) {
      ++outcome.merge_failures;
      // roll back reservoir consumption for this factor
      for (const auto& [lu, lv] : merged.consumed) {
        for (CombinedPair* cp : used_pairs) {
          // translate local slice ids back to pair-local ids when they fit
          Vertex gu = vertices[lu], gv = vertices[lv];
          auto la = std::find(cp->left_ids.begin(), cp->left_ids.end(), gu);
          auto rb = std::find(cp->right_ids.begin(), cp->right_ids.end(), gv);
          if (la != cp->left_ids.end() && rb != cp->right_ids.end()) {
            cp->pair.add_edge(static_cast<int>(la - cp->left_ids.begin()),
                              static_cast<int>(rb - cp->right_ids.begin()));
            break;
          }
        }
      }
      continue;
    }
    // verified single cycle covering the slice vertex set
    const auto& cyc = merged.hamilton.cycles()[0];
    if (cyc.size() != vertices.size()) {
      ++outcome.merge_failures;
      continue;
    }
    std::vector<Vertex> global_cycle;
    global_cycle.reserve(cyc.size());
    for (Vertex lv : cyc) global_cycle.push_back(vertices[lv]);
    outcome.cycles.push_back(std::move(global_cycle));
    for (const auto& [lu, lv] : merged.consumed)
      globally_consumed.emplace_back(vertices[lu], vertices[lv]);
  }

  // propagate pool consumption: remove globally consumed edges from the pool
  // (H3 was slice-private; only pool edges survive the slice)
  for (const auto& [gu, gv] : globally_consumed) {
    int cu = cluster_of[gu], cv = cluster_of[gv];
    if (cu < 0 || cv < 0) continue;
    int sp = config.s * config.p;
    int pu = slice.refined ? cu / sp : cu;
    int pv = slice.refined ? cv / sp : cv;
    auto poolit = reservoirs.pool.find({pu, pv});
    if (poolit == reservoirs.pool.end()) continue;
    auto& handle = poolit->second;
    auto la = std::find(handle.left_ids.begin(), handle.left_ids.end(), gu);
    auto rb = std::find(handle.right_ids.begin(), handle.right_ids.end(), gv);
    if (la != handle.left_ids.end() && rb != handle.right_ids.end())
      handle.pair.remove_edge(static_cast<int>(la - handle.left_ids.begin()),
                              static_cast<int>(rb - handle.right_ids.begin()));
  }
  return outcome;
}

std::string verify_cycles(const Multidigraph& G, const std::vector<std::vector<Vertex>>& cycles) {
  const int n = G.vertex_count();
  std::map<std::pair<Vertex, Vertex>, int> used;
  for (size_t c = 0; c < cycles.size(); ++c) {
    const auto& cycle = cycles[c];
    if (static_cast<int>(cycle.size()) != n)
      return "cycle " + std::to_string(c) + " does not span V(G)";
    std::vector<char> seen(n, 0);
    for (Vertex v : cycle) {
      if (v < 0 || v >= n || seen[v]) return "cycle " + std::to_string(c) + " repeats a vertex";
      seen[v] = 1;
    }
    for (size_t i = 0; i < cycle.size(); ++i) {
      Vertex u = cycle[i], v = cycle[(i + 1) % cycle.size()];
      int cnt = ++used[{u, v}];
      if (cnt > G.multiplicity(u, v))
        return "edge " + std::to_string(u) + "->" + std::to_string(v) +
               " used more often than its multiplicity";
    }
  }
  return "";
}

namespace {

// Degenerate single-cluster mode: greedy Hamilton peeling on G itself.
DecomposeResult degenerate_decompose(const Instance& instance, const PipelineConfig& config) {
  DecomposeResult result;
  Multidigraph work = instance.graph;
  const int n = work.vertex_count();
  result.report.delta0 = instance.graph.min_semidegree();
  result.report.edges_total = instance.graph.edge_count();
  int consecutive_failures = 0;
  uint64_t seed = config.seed;
  while (consecutive_failures < 2) {
    Multidigraph support(n);
    for (const auto& [u, v, mult] : work.edges()) support.add_edge(u, v);
    HamiltonResult ham = find_hamilton(support, config.ham_budget, seed++);
    if (!ham.cycle) {
      ++consecutive_failures;
      continue;
    }
    consecutive_failures = 0;
    for (size_t i = 0; i < ham.cycle->size(); ++i)
      work.remove_edge((*ham.cycle)[i], (*ham.cycle)[(i + 1) % ham.cycle->size()]);
    result.cycles.push_back(std::move(*ham.cycle));
  }
  result.report.cycle_count = static_cast<int>(result.cycles.size());
  result.report.edges_in_cycles = static_cast<long long>(result.cycles.size()) * n;
  result.report.achieved_fraction =
      result.report.delta0 > 0
          ? static_cast<double>(result.report.cycle_count) / result.report.delta0
          : 0.0;
  std::string err = verify_cycles(instance.graph, result.cycles);
  result.report.all_cycles_verified = err.empty();
  result.report.edge_disjoint_verified = err.empty();
  result.report.slice_diagnostics.push_back("degenerate single-cluster mode (greedy peel)");
  if (!err.empty()) throw std::runtime_error("degenerate_decompose: verification failed: " + err);
  return result;
}

}  // namespace

DecomposeResult approx_decompose(const Instance& instance, const PipelineConfig& config) {
  config.validate();
  if (instance.partition.cluster_count() < 2) return degenerate_decompose(instance, config);

  DecomposeResult result;
  result.report.delta0 = instance.graph.min_semidegree();
  result.report.edges_total = instance.graph.edge_count();

  ReduceResult reduced =
      reduce_and_regularize(instance.graph, instance.partition, instance.reduced, config);
  result.report.r_tilde = reduced.reduced.r_tilde;

  std::vector<Slice> slices = build_slices(instance, reduced, config);
  if (!slices.empty()) result.report.kappa = slices.front().kappa;

  for (auto& slice : slices) {
    SliceOutcome outcome = decompose_slice(slice, reduced.reservoirs, instance.graph, config);
    std::ostringstream diag;
    diag << "slice " << outcome.slice_index << ": ";
    if (!outcome.failure.empty()) {
      diag << "FAILED (" << outcome.failure << ")";
    } else {
      diag << outcome.cycles.size() << "/" << outcome.factors_built << " factors merged";
      if (outcome.merge_failures > 0) diag << ", " << outcome.merge_failures << " merge failures";
    }
    result.report.slice_diagnostics.push_back(diag.str());
    for (auto& cycle : outcome.cycles) result.cycles.push_back(std::move(cycle));
  }

  result.report.cycle_count = static_cast<int>(result.cycles.size());
  result.report.edges_in_cycles =
      static_cast<long long>(result.cycles.size()) * instance.graph.vertex_count();
  result.report.achieved_fraction =
      result.report.delta0 > 0
          ? static_cast<double>(result.report.cycle_count) / result.report.delta0
          : 0.0;
  std::string err = verify_cycles(instance.graph, result.cycles);
  result.report.all_cycles_verified = err.empty();
  result.report.edge_disjoint_verified = err.empty();
  if (!err.empty()) throw std::runtime_error("approx_decompose: verification failed: " + err);
  return result;
}

std::string DecomposeReport::to_json() const {
  nlohmann::json j;
  j["cycle_count"] = cycle_count;
  j["delta0"] = delta0;
  j["r_tilde"] = r_tilde;
  j["kappa"] = kappa;
  j["achieved_fraction"] = achieved_fraction;
  j["edges_total"] = edges_total;
  j["edges_in_cycles"] = edges_in_cycles;
  j["slice_diagnostics"] = slice_diagnostics;
  j["waivers"] = waivers;
  j["edge_disjoint_verified"] = edge_disjoint_verified;
  j["all_cycles_verified"] = all_cycles_verified;
  return j.dump(2);
}

RegularizeResult regularize_almost_regular(const Multidigraph& G, const Rational& alpha,
                                           const Rational& gamma) {
  RegularizeResult result;
  const int n = G.vertex_count();
  const double target_real = (alpha.to_double() - std::sqrt(gamma.to_double())) * n;
  result.target_degree = static_cast<int>(std::floor(target_real));
  if (result.target_degree < 1)
    throw std::invalid_argument("regularize_almost_regular: target degree below 1");

  // advisory validation of the Corollary hypothesis
  for (int v = 0; v < n; ++v) {
    Rational lo = (alpha - gamma) * Rational(n), hi = (alpha + gamma) * Rational(n);
    for (int deg : {G.out_degree(v), G.in_degree(v)}) {
      if (!(lo <= Rational(deg) && Rational(deg) <= hi)) {
        result.warnings.push_back("vertex " + std::to_string(v) +
                                  " degree outside (alpha +- gamma) n; proceeding (advisory)");
        break;
      }
    }
    if (!result.warnings.empty()) break;
  }

  DegreePrescription demands;
  demands.out_demand.resize(n);
  demands.in_demand.resize(n);
  for (int v = 0; v < n; ++v) {
    demands.out_demand[v] = G.out_degree(v) - result.target_degree;
    demands.in_demand[v] = G.in_degree(v) - result.target_degree;
    if (demands.out_demand[v] < 0 || demands.in_demand[v] < 0)
      throw std::runtime_error("regularize_almost_regular: a degree is below the target");
  }
  PrescribedResult flow = prescribed_subgraph(G, demands);
  if (!flow.feasible())
    throw std::runtime_error("regularize_almost_regular: flow infeasible (cut capacity " +
                             std::to_string(flow.cut->capacity) + ")");
  result.removed = *flow.subgraph;
  result.remainder = G.minus(result.removed);
  for (int v = 0; v < n; ++v) {
    if (result.remainder.out_degree(v) != result.target_degree ||
        result.remainder.in_degree(v) != result.target_degree)
      throw std::runtime_error("regularize_almost_regular: remainder is not exactly regular");
  }
  return result;
}

}  // namespace hamdec
