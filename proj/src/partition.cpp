#include "hamdec/partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "hamdec/derandom.hpp"
#include "hamdec/rng.hpp"
#include "json.hpp"

namespace hamdec {

int ClusterPartition::ground_size() const {
  int n = static_cast<int>(exceptional.size());
  for (const auto& c : clusters) n += static_cast<int>(c.size());
  return n;
}

void ClusterPartition::validate() const {
  const int n = ground_size();
  std::vector<char> seen(n, 0);
  auto mark = [&](int v) {
    if (v < 0 || v >= n) throw std::invalid_argument("ClusterPartition: vertex out of range");
    if (seen[v]++) throw std::invalid_argument("ClusterPartition: vertex appears twice");
  };
  for (int v : exceptional) mark(v);
  size_t m = clusters.empty() ? 0 : clusters[0].size();
  for (const auto& c : clusters) {
    if (c.size() != m) throw std::invalid_argument("ClusterPartition: unequal cluster sizes");
    for (int v : c) mark(v);
  }
}

std::string ClusterPartition::to_json() const {
  nlohmann::json j;
  j["exceptional"] = exceptional;
  j["clusters"] = clusters;
  return j.dump();
}

ClusterPartition ClusterPartition::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  ClusterPartition p;
  p.exceptional = j.at("exceptional").get<std::vector<int>>();
  p.clusters = j.at("clusters").get<std::vector<std::vector<int>>>();
  for (auto& c : p.clusters) std::sort(c.begin(), c.end());
  std::sort(p.exceptional.begin(), p.exceptional.end());
  p.validate();
  return p;
}

ClosenessVerdict check_close(const ClusterPartition& P, const ClusterPartition& Q,
                             const Rational& eps) {
  const int m = P.cluster_size();
  const int mq = Q.cluster_size();
  if (m < mq) throw std::invalid_argument("check_close: need cluster sizes m >= m'");
  if (Rational(m - mq) > Rational(2) * eps * Rational(mq))
    throw std::invalid_argument("check_close: |m - m'| > 2*eps*m'");

  ClosenessVerdict verdict;
  // exceptional overlap >= (1-eps)|V0(Q)|
  {
    std::vector<int> inter;
    std::set_intersection(P.exceptional.begin(), P.exceptional.end(), Q.exceptional.begin(),
                          Q.exceptional.end(), std::back_inserter(inter));
    long long need_den = eps.den();
    long long rhs = (Rational(1) - eps).num() * static_cast<long long>(Q.exceptional.size());
    if (static_cast<long long>(inter.size()) * need_den < rhs) {
      verdict.exceptional_failed = true;
      return verdict;
    }
  }
  int n = std::max(P.ground_size(), Q.ground_size());
  std::vector<int> p_cluster_of(n, -1);
  for (int c = 0; c < P.cluster_count(); ++c)
    for (int v : P.clusters[c]) p_cluster_of[v] = c;

  verdict.association.partner.assign(Q.cluster_count(), -1);
  verdict.association.overlap.assign(Q.cluster_count(), 0);
  for (int u = 0; u < Q.cluster_count(); ++u) {
    std::map<int, int> counts;
    for (int v : Q.clusters[u])
      if (v < n && p_cluster_of[v] >= 0) ++counts[p_cluster_of[v]];
    int best = -1, best_count = 0;
    for (const auto& [c, cnt] : counts)
      if (cnt > best_count) {
        best = c;
        best_count = cnt;
      }
    // |U ∩ V| >= (1-eps) m'
    if (best >= 0 &&
        static_cast<long long>(best_count) * eps.den() >=
            (Rational(1) - eps).num() * static_cast<long long>(mq)) {
      verdict.association.partner[u] = best;
      verdict.association.overlap[u] = best_count;
    } else {
      verdict.failing_cluster = u;
      return verdict;
    }
  }
  verdict.close = true;
  std::vector<char> used(P.cluster_count(), 0);
  verdict.association.bijective = P.cluster_count() == Q.cluster_count();
  for (int u = 0; u < Q.cluster_count(); ++u) {
    int v = verdict.association.partner[u];
    if (used[v]) verdict.association.bijective = false;
    used[v] = 1;
  }
  return verdict;
}

bool uref_holds(const ClusterPartition& parent, const ClusterPartition& refined, int ell,
                const std::vector<const Multidigraph*>& graphs, const Rational& eps) {
  const int n = parent.ground_size();
  const int L = parent.cluster_count();
  // refined cluster c*ell+j is the j-th part of parent cluster c
  std::vector<int> parent_of(n, -1), sub_of(n, -1);
  for (int c = 0; c < L; ++c)
    for (int v : parent.clusters[c]) parent_of[v] = c;
  for (int s = 0; s < refined.cluster_count(); ++s)
    for (int v : refined.clusters[s]) sub_of[v] = s;

  std::vector<int> per_cluster(L), per_sub(L * ell);
  for (const Multidigraph* G : graphs) {
    for (int x = 0; x < G->vertex_count(); ++x) {
      for (int dir = 0; dir < 2; ++dir) {
        std::fill(per_cluster.begin(), per_cluster.end(), 0);
        std::fill(per_sub.begin(), per_sub.end(), 0);
        const auto& nbrs = dir == 0 ? G->out(x) : G->in(x);
        for (const auto& [y, mult] : nbrs) {
          if (parent_of[y] >= 0) ++per_cluster[parent_of[y]];
          if (sub_of[y] >= 0) ++per_sub[sub_of[y]];
        }
        for (int c = 0; c < L; ++c) {
          long long dxv = per_cluster[c];
          long long msize = static_cast<long long>(parent.clusters[c].size());
          if (dxv * eps.den() < eps.num() * msize) continue;  // |N ∩ V| < eps|V|
          for (int j = 0; j < ell; ++j) {
            long long sub = per_sub[c * ell + j];
            // (1-eps) dxv / ell <= sub <= (1+eps) dxv / ell, exact
            long long lhs = sub * static_cast<long long>(ell) * eps.den();
            if (lhs < (eps.den() - eps.num()) * dxv || lhs > (eps.den() + eps.num()) * dxv)
              return false;
          }
        }
      }
    }
  }
  return true;
}

namespace {

ClusterPartition split_clusters(const ClusterPartition& P, int ell,
                                const std::vector<std::vector<int>>& order) {
  ClusterPartition refined;
  refined.exceptional = P.exceptional;
  const int part = P.cluster_size() / ell;
  for (int c = 0; c < P.cluster_count(); ++c) {
    for (int j = 0; j < ell; ++j) {
      std::vector<int> sub(order[c].begin() + j * part, order[c].begin() + (j + 1) * part);
      std::sort(sub.begin(), sub.end());
      refined.clusters.push_back(std::move(sub));
    }
  }
  return refined;
}

// Derandomised 2-split: one 0/1 variable per clustered vertex, plus a direct
// size equalisation afterwards. Only attempted when the Chernoff score fits.
std::optional<ClusterPartition> derandomized_2split(const ClusterPartition& P,
                                                    const std::vector<const Multidigraph*>& graphs,
                                                    const Rational& eps) {
  const int n = P.ground_size();
  std::vector<int> var_of(n, -1);
  std::vector<int> vertex_of;
  for (const auto& c : P.clusters)
    for (int v : c) {
      var_of[v] = static_cast<int>(vertex_of.size());
      vertex_of.push_back(v);
    }
  std::vector<int> parent_of(n, -1);
  for (int c = 0; c < P.cluster_count(); ++c)
    for (int v : P.clusters[c]) parent_of[v] = c;

  DerandomInstance inst;
  inst.variable_count = static_cast<int>(vertex_of.size());
  inst.p = Rational(1, 2);
  const Rational beta = eps / Rational(2);
  for (const Multidigraph* G : graphs) {
    for (int x = 0; x < G->vertex_count(); ++x) {
      for (int dir = 0; dir < 2; ++dir) {
        std::vector<std::vector<int>> support(P.cluster_count());
        const auto& nbrs = dir == 0 ? G->out(x) : G->in(x);
        for (const auto& [y, mult] : nbrs)
          if (parent_of[y] >= 0) support[parent_of[y]].push_back(var_of[y]);
        for (int c = 0; c < P.cluster_count(); ++c) {
          long long dxv = static_cast<long long>(support[c].size());
          long long msize = static_cast<long long>(P.clusters[c].size());
          if (dxv * eps.den() < eps.num() * msize) continue;
          std::sort(support[c].begin(), support[c].end());
          inst.events.push_back({support[c], Tail::Upper, beta});
          inst.events.push_back({support[c], Tail::Lower, beta});
        }
      }
    }
  }
  if (inst.events.empty() || !inst.feasible()) return std::nullopt;
  std::vector<int> x = derandomize(inst);

  std::vector<std::vector<int>> order(P.cluster_count());
  for (int c = 0; c < P.cluster_count(); ++c) {
    std::vector<int> zeros, ones;
    for (int v : P.clusters[c]) (x[var_of[v]] ? ones : zeros).push_back(v);
    // equalize sizes by moving the tail of the larger side
    const int half = P.cluster_size() / 2;
    while (static_cast<int>(zeros.size()) > half) {
      ones.push_back(zeros.back());
      zeros.pop_back();
    }
    while (static_cast<int>(ones.size()) > half) {
      zeros.push_back(ones.back());
      ones.pop_back();
    }
    order[c] = zeros;
    order[c].insert(order[c].end(), ones.begin(), ones.end());
  }
  return split_clusters(P, 2, order);
}

}  // namespace

ClusterPartition uniform_refinement(const ClusterPartition& P, int ell,
                                    const std::vector<const Multidigraph*>& graphs,
                                    const Rational& eps, uint64_t seed, int retries) {
  P.validate();
  if (ell < 1) throw std::invalid_argument("uniform_refinement: ell must be >= 1");
  if (ell == 1) return P;
  if (P.cluster_size() % ell != 0)
    throw std::invalid_argument("uniform_refinement: cluster size not divisible by ell");

  if (ell == 2) {
    auto derand = derandomized_2split(P, graphs, eps);
    if (derand && uref_holds(P, *derand, ell, graphs, eps)) return *derand;
  }
  for (int attempt = 0; attempt < retries; ++attempt) {
    Rng rng(seed + static_cast<uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
    std::vector<std::vector<int>> order(P.cluster_count());
    for (int c = 0; c < P.cluster_count(); ++c) {
      order[c] = P.clusters[c];
      rng.shuffle(order[c]);
    }
    ClusterPartition refined = split_clusters(P, ell, order);
    if (uref_holds(P, refined, ell, graphs, eps)) return refined;
  }
  throw std::runtime_error(
      "uniform_refinement: URef scan failed for all seeds; try larger m or larger eps");
}

ClusterPartition refine_close(const ClusterPartition& P_base, const ClusterPartition& P_ref,
                              const ClusterPartition& R, int ell, const Rational& eps2) {
  const int mq = R.cluster_size();
  if (mq % ell != 0) throw std::invalid_argument("refine_close: m' not divisible by ell");
  const int part = mq / ell;
  ClosenessVerdict closeness = check_close(P_base, R, eps2);
  if (!closeness.close)
    throw std::runtime_error("refine_close: R is not eps2-close to the base partition");
  // invert: base cluster -> R cluster
  std::vector<int> r_of_base(P_base.cluster_count(), -1);
  for (int u = 0; u < R.cluster_count(); ++u) r_of_base[closeness.association.partner[u]] = u;

  // target size of the picked core: floor((1 - eps2*ell) * m' / ell)
  const long long target = ((Rational(1) - eps2 * Rational(ell)) * Rational(mq, ell)).floor();

  ClusterPartition result;
  result.exceptional = R.exceptional;
  result.clusters.assign(static_cast<size_t>(R.cluster_count()) * ell, {});

  const int n = std::max(P_base.ground_size(), R.ground_size());
  std::vector<char> in_vcluster(n, 0);

  for (int u = 0; u < P_base.cluster_count(); ++u) {
    int rv = r_of_base[u];
    if (rv < 0) throw std::runtime_error("refine_close: association is not a bijection");
    const auto& V = R.clusters[rv];
    std::fill(in_vcluster.begin(), in_vcluster.end(), 0);
    for (int x : V) in_vcluster[x] = 1;

    std::vector<char> placed(n, 0);
    for (int j = 0; j < ell; ++j) {
      const auto& Uj = P_ref.clusters[static_cast<size_t>(u) * ell + j];
      std::vector<int> core;
      for (int x : Uj)
        if (in_vcluster[x]) core.push_back(x);
      if (static_cast<long long>(core.size()) < target)
        throw std::runtime_error("refine_close: overlap insufficient (inputs not actually close)");
      core.resize(static_cast<size_t>(target));
      for (int x : core) placed[x] = 1;
      result.clusters[static_cast<size_t>(rv) * ell + j] = std::move(core);
    }
    // leftovers of V round-robin by subcluster index until all parts reach m'/ell
    std::vector<int> leftovers;
    for (int x : V)
      if (!placed[x]) leftovers.push_back(x);
    size_t next = 0;
    for (int x : leftovers) {
      for (int tries = 0; tries < ell; ++tries) {
        auto& sub = result.clusters[static_cast<size_t>(rv) * ell + (next % ell)];
        ++next;
        if (static_cast<int>(sub.size()) < part) {
          sub.push_back(x);
          break;
        }
      }
    }
  }
  for (auto& sub : result.clusters) std::sort(sub.begin(), sub.end());
  result.validate();
  return result;
}

RedMarking mark_clean_and_red(const OneFactor& s_factor, const RedScheme& scheme) {
  const int s = scheme.s;
  const int n = s_factor.vertex_count();
  if (s < 2 || s % 2 != 0) throw std::invalid_argument("mark_clean_and_red: s must be even, >= 2");

  RedMarking marking;
  marking.clean.assign(n, 0);
  marking.red_2p_index.assign(n, -1);
  marking.in_red.assign(n, 0);
  marking.out_red.assign(n, 0);

  for (const auto& cycle : s_factor.cycles()) {
    if (cycle.size() % s != 0)
      throw std::invalid_argument("mark_clean_and_red: cycle length not divisible by s");
    const int K = static_cast<int>(cycle.size()) / s;
    for (int i = 0; i < K; ++i) marking.clean[cycle[cycle.size() - 1 - i]] = 1;
  }

  // the red 2p-subcluster: k with t == k (mod 2p), 1-based in 1..2p
  const int two_p = 2 * scheme.p;
  const int k_red = ((scheme.t - 1) % two_p + two_p) % two_p + 1;
  for (int v = 0; v < n; ++v)
    if (!marking.clean[v]) marking.red_2p_index[v] = k_red;

  // group s-clusters by primary cluster
  std::map<int, std::vector<int>> by_primary;
  for (int v = 0; v < n; ++v) {
    if (scheme.primary_of.at(v) < 0) continue;
    by_primary[scheme.primary_of[v]].push_back(v);
  }
  for (auto& [w, members] : by_primary) {
    if (static_cast<int>(members.size()) != s)
      throw std::invalid_argument("mark_clean_and_red: primary cluster without exactly s subclusters");
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      return scheme.index_in_primary[a] < scheme.index_in_primary[b];
    });
    int cleans = 0;
    for (int v : members) cleans += marking.clean[v];
    if (cleans != 1)
      throw std::runtime_error("mark_clean_and_red: primary cluster must contain exactly one clean s-cluster");
    std::vector<int> first_half, second_half;
    for (int i = 0; i < s; ++i) {
      if (marking.clean[members[i]]) continue;
      (i < s / 2 ? first_half : second_half).push_back(members[i]);
    }
    while (static_cast<int>(first_half.size()) > s / 2 - 1) first_half.pop_back();
    while (static_cast<int>(second_half.size()) > s / 2 - 1) second_half.pop_back();
    const bool flip = scheme.f > scheme.big_f;  // second block of slices swaps roles
    for (int v : first_half) (flip ? marking.out_red : marking.in_red)[v] = 1;
    for (int v : second_half) (flip ? marking.in_red : marking.out_red)[v] = 1;
  }
  return marking;
}

}  // namespace hamdec
