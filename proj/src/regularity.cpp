#include "hamdec/regularity.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "hamdec/factorflow.hpp"
#include "hamdec/rng.hpp"

namespace hamdec {

RegularityParams RegularityParams::derive(const Rational& eps, const Rational& d,
                                          const Rational& beta, const Rational& gamma,
                                          const Rational& xi) {
  RegularityParams p;
  p.eps = eps;
  p.d = d;
  p.beta = beta;
  p.gamma = gamma;
  p.xi = xi;
  p.beta1 = (Rational(1) - Rational(5) * gamma) * beta;
  p.beta2 = (Rational(1) - gamma * gamma) * p.beta1;
  p.validate();
  return p;
}

void RegularityParams::validate() const {
  if (!(Rational(0) < eps && eps < d && d <= Rational(1)))
    throw std::invalid_argument("RegularityParams: need 0 < eps < d <= 1");
  if (beta1 != (Rational(1) - Rational(5) * gamma) * beta)
    throw std::invalid_argument("RegularityParams: beta1 != (1-5*gamma)*beta");
  if (beta2 != (Rational(1) - gamma * gamma) * beta1)
    throw std::invalid_argument("RegularityParams: beta2 != (1-gamma^2)*beta1");
}

Rational density(const BipartitePair& pair) {
  if (pair.left_size() == 0 || pair.right_size() == 0)
    throw std::invalid_argument("density: empty class");
  return Rational(pair.edge_count(),
                  static_cast<long long>(pair.left_size()) * pair.right_size());
}

namespace {

// |E*x*y - e*NA*NB| <= eps*NA*NB*x*y, all in int64 (sizes <= 32 keep this tiny)
bool subpair_ok(long long E, long long e, long long NA, long long NB, long long x, long long y,
                const Rational& eps) {
  long long lhs = E * x * y - e * NA * NB;
  if (lhs < 0) lhs = -lhs;
  return lhs * eps.den() <= eps.num() * NA * NB * x * y;
}

bool size_at_least(long long size, long long cls, const Rational& eps) {
  // size >= eps * cls
  return size * eps.den() >= eps.num() * cls;
}

}  // namespace

RegularityVerdict check_regular(const BipartitePair& pair, const Rational& eps, CheckMode mode,
                                int samples, uint64_t seed, int exhaustive_cap) {
  const int na = pair.left_size(), nb = pair.right_size();
  const long long E = pair.edge_count();
  RegularityVerdict verdict;

  if (mode == CheckMode::Exhaustive) {
    if (na + nb > exhaustive_cap)
      throw std::invalid_argument("check_regular: exhaustive mode above configured cap");
    std::vector<uint32_t> row_mask(na, 0);
    for (int a = 0; a < na; ++a)
      for (int b : pair.neighbours_left(a)) row_mask[a] |= (1u << b);

    std::vector<long long> e_for_y(static_cast<size_t>(1) << nb);
    std::vector<int> colcnt(nb);
    const uint32_t xlimit = (1u << na) - 1;
    for (uint32_t xm = 1; xm <= xlimit && xm != 0; ++xm) {
      int xsize = std::popcount(xm);
      if (!size_at_least(xsize, na, eps)) continue;
      std::fill(colcnt.begin(), colcnt.end(), 0);
      for (int a = 0; a < na; ++a)
        if (xm & (1u << a))
          for (int b : pair.neighbours_left(a)) ++colcnt[b];
      e_for_y[0] = 0;
      for (uint32_t ym = 1; ym < (1u << nb); ++ym) {
        int low = std::countr_zero(ym);
        e_for_y[ym] = e_for_y[ym & (ym - 1)] + colcnt[low];
        int ysize = std::popcount(ym);
        if (!size_at_least(ysize, nb, eps)) continue;
        ++verdict.pairs_checked;
        if (!subpair_ok(E, e_for_y[ym], na, nb, xsize, ysize, eps)) {
          verdict.kind = RegularityVerdict::Kind::ViolatingSubpair;
          for (int a = 0; a < na; ++a)
            if (xm & (1u << a)) verdict.X.push_back(a);
          for (int b = 0; b < nb; ++b)
            if (ym & (1u << b)) verdict.Y.push_back(b);
          return verdict;
        }
      }
    }
    verdict.kind = RegularityVerdict::Kind::Pass;
    return verdict;
  }

  Rng rng(seed);
  verdict.kind = RegularityVerdict::Kind::NoViolationFound;
  for (int k = 0; k < samples; ++k) {
    int xmin = 0;
    while (!size_at_least(xmin, na, eps) && xmin <= na) ++xmin;
    int ymin = 0;
    while (!size_at_least(ymin, nb, eps) && ymin <= nb) ++ymin;
    if (xmin > na || ymin > nb || xmin == 0 || ymin == 0) break;
    int xs = rng.range(xmin, na), ys = rng.range(ymin, nb);
    std::vector<int> pa = rng.permutation(na), pb = rng.permutation(nb);
    std::vector<char> inx(na, 0), iny(nb, 0);
    for (int i = 0; i < xs; ++i) inx[pa[i]] = 1;
    for (int i = 0; i < ys; ++i) iny[pb[i]] = 1;
    long long e = 0;
    for (int a = 0; a < na; ++a)
      if (inx[a])
        for (int b : pair.neighbours_left(a))
          if (iny[b]) ++e;
    ++verdict.pairs_checked;
    if (!subpair_ok(E, e, na, nb, xs, ys, eps)) {
      verdict.kind = RegularityVerdict::Kind::ViolatingSubpair;
      for (int a = 0; a < na; ++a)
        if (inx[a]) verdict.X.push_back(a);
      for (int b = 0; b < nb; ++b)
        if (iny[b]) verdict.Y.push_back(b);
      return verdict;
    }
  }
  return verdict;
}

RegularityVerdict check_superregular(const BipartitePair& pair, const Rational& eps,
                                     const Rational& d, CheckMode mode, int samples,
                                     uint64_t seed, int exhaustive_cap) {
  const int na = pair.left_size(), nb = pair.right_size();
  // degree windows first: d(a) = (d +- eps)|B|, closed intervals, exact
  auto in_window = [&](long long deg, long long cls) {
    Rational lo = (d - eps) * Rational(cls), hi = (d + eps) * Rational(cls);
    return lo <= Rational(deg) && Rational(deg) <= hi;
  };
  RegularityVerdict verdict;
  for (int a = 0; a < na; ++a)
    if (!in_window(pair.degree_left(a), nb)) {
      verdict.kind = RegularityVerdict::Kind::DegreeViolation;
      verdict.vertex = a;
      verdict.on_left = true;
      return verdict;
    }
  for (int b = 0; b < nb; ++b)
    if (!in_window(pair.degree_right(b), na)) {
      verdict.kind = RegularityVerdict::Kind::DegreeViolation;
      verdict.vertex = b;
      verdict.on_left = false;
      return verdict;
    }
  Rational dens = density(pair);
  if (!(d - eps <= dens && dens <= d + eps)) {
    verdict.kind = RegularityVerdict::Kind::DensityViolation;
    return verdict;
  }
  return check_regular(pair, eps, mode, samples, seed, exhaustive_cap);
}

namespace {

// Peels maximum matchings; on r-regular input these are perfect all the way
// down (Koenig), so the slices come out exactly regular.
std::vector<std::vector<std::pair<int, int>>> peel_matchings(const BipartitePair& pair,
                                                             int count) {
  BipartitePair rest = pair;
  std::vector<std::vector<std::pair<int, int>>> matchings;
  for (int t = 0; t < count; ++t) {
    // maximum matching via repeated augmenting on the residual pair
    const int na = rest.left_size(), nb = rest.right_size();
    std::vector<int> match_left(na, -1), match_right(nb, -1);
    std::function<bool(int, std::vector<char>&)> augment = [&](int a, std::vector<char>& vis) {
      for (int b : rest.neighbours_left(a)) {
        if (vis[b]) continue;
        vis[b] = 1;
        if (match_right[b] < 0 || augment(match_right[b], vis)) {
          match_left[a] = b;
          match_right[b] = a;
          return true;
        }
      }
      return false;
    };
    for (int a = 0; a < na; ++a) {
      std::vector<char> vis(nb, 0);
      augment(a, vis);
    }
    std::vector<std::pair<int, int>> m;
    for (int a = 0; a < na; ++a)
      if (match_left[a] >= 0) {
        m.emplace_back(a, match_left[a]);
        rest.remove_edge(a, match_left[a]);
      }
    if (m.empty()) break;
    matchings.push_back(std::move(m));
  }
  return matchings;
}

}  // namespace

std::vector<BipartitePair> slice_pair(const BipartitePair& pair,
                                      const std::vector<Rational>& gammas, const Rational& d,
                                      uint64_t seed, const Rational& eps, SliceMode mode,
                                      int retries) {
  const int K = static_cast<int>(gammas.size());
  Rational total(0);
  for (const auto& g : gammas) {
    if (!(g > Rational(0))) throw std::invalid_argument("slice_pair: shares must be positive");
    total = total + g;
  }
  if (total > d) throw std::invalid_argument("slice_pair: probability sum exceeds 1");
  Rational dens = density(pair);
  if (!(d - eps <= dens && dens <= d + eps))
    throw std::invalid_argument("slice_pair: d not within eps of density(P)");

  const int na = pair.left_size(), nb = pair.right_size();
  const double window = std::pow(eps.to_double(), 1.0 / 12.0);

  auto post_check = [&](const std::vector<BipartitePair>& slices) {
    // vertices with P-degree (d +- eps)*m get slice degrees (gamma_k +- eps^(1/12))*m
    auto vertex_ok = [&](int deg_p, long long cls, int deg_slice, const Rational& g) {
      Rational lo = (d - eps) * Rational(cls), hi = (d + eps) * Rational(cls);
      if (!(lo <= Rational(deg_p) && Rational(deg_p) <= hi)) return true;  // unconstrained
      double gm = g.to_double() * static_cast<double>(cls);
      double w = window * static_cast<double>(cls);
      return gm - w - 1e-9 <= deg_slice && deg_slice <= gm + w + 1e-9;
    };
    for (int k = 0; k < K; ++k) {
      for (int a = 0; a < na; ++a)
        if (!vertex_ok(pair.degree_left(a), nb, slices[k].degree_left(a), gammas[k]))
          return false;
      for (int b = 0; b < nb; ++b)
        if (!vertex_ok(pair.degree_right(b), na, slices[k].degree_right(b), gammas[k]))
          return false;
    }
    return true;
  };

  for (int attempt = 0; attempt < retries; ++attempt) {
    std::vector<BipartitePair> slices(K, BipartitePair(na, nb));
    if (mode == SliceMode::Seeded) {
      Rng rng(seed + static_cast<uint64_t>(attempt) * 0x9e3779b9ULL);
      std::vector<double> cumulative(K);
      double acc = 0;
      for (int k = 0; k < K; ++k) {
        acc += (gammas[k] / d).to_double();
        cumulative[k] = acc;
      }
      for (const auto& [a, b] : pair.edges()) {
        double u = rng.unit();
        for (int k = 0; k < K; ++k)
          if (u < cumulative[k]) {
            slices[k].add_edge(a, b);
            break;
          }
      }
    } else {
      // shares realized as counts of peeled matchings
      int max_deg = 0;
      for (int a = 0; a < na; ++a) max_deg = std::max(max_deg, pair.degree_left(a));
      for (int b = 0; b < nb; ++b) max_deg = std::max(max_deg, pair.degree_right(b));
      auto matchings = peel_matchings(pair, max_deg + K);
      const int avail = static_cast<int>(matchings.size());
      std::vector<int> want(K);
      int assigned = 0;
      for (int k = 0; k < K; ++k) {
        double share = (gammas[k] / d).to_double();
        want[k] = static_cast<int>(std::lround(share * avail));
        assigned += want[k];
      }
      // never exceed what was peeled; trim largest shares first
      for (int k = 0; assigned > avail && k < K; ++k) {
        int excess = assigned - avail;
        int cut = std::min(excess, want[k]);
        want[k] -= cut;
        assigned -= cut;
      }
      int next = 0;
      for (int k = 0; k < K; ++k)
        for (int c = 0; c < want[k]; ++c, ++next)
          for (const auto& [a, b] : matchings[next]) slices[k].add_edge(a, b);
    }
    if (post_check(slices)) return slices;
  }
  throw std::runtime_error("slice_pair: degree post-check failed for all retry seeds");
}

TrimResult trim_to_superregular(const std::vector<BipartitePair>& cycle_pairs,
                                const Rational& eps, const Rational& gamma) {
  const int k = static_cast<int>(cycle_pairs.size());
  if (k == 0) throw std::invalid_argument("trim_to_superregular: empty cycle");
  const int m = cycle_pairs[0].left_size();
  for (const auto& p : cycle_pairs)
    if (p.left_size() != m || p.right_size() != m)
      throw std::invalid_argument("trim_to_superregular: clusters must have equal size");

  const long long budget = ((Rational(2) * eps) * Rational(m)).floor();
  auto deviant = [&](long long deg) {
    // deg <= (gamma - 2 eps) m  or  deg >= (gamma + 2 eps) m
    Rational lo = (gamma - Rational(2) * eps) * Rational(m);
    Rational hi = (gamma + Rational(2) * eps) * Rational(m);
    return Rational(deg) <= lo || Rational(deg) >= hi;
  };

  TrimResult result;
  result.kept.resize(k);
  std::vector<std::vector<char>> removed(k, std::vector<char>(m, 0));
  for (int j = 0; j < k; ++j) {
    const auto& out_pair = cycle_pairs[j];                  // cluster j is its left class
    const auto& in_pair = cycle_pairs[(j + k - 1) % k];     // cluster j is its right class
    std::vector<int> deviants;
    for (int v = 0; v < m; ++v)
      if (deviant(out_pair.degree_left(v)) || deviant(in_pair.degree_right(v)))
        deviants.push_back(v);
    if (static_cast<long long>(deviants.size()) > budget)
      throw std::runtime_error("trim_to_superregular: more than 2*eps*m deviant vertices in cluster " +
                               std::to_string(j));
    long long removed_count = 0;
    for (int v : deviants) {
      removed[j][v] = 1;
      ++removed_count;
    }
    for (int v = 0; v < m && removed_count < budget; ++v)
      if (!removed[j][v]) {
        removed[j][v] = 1;
        ++removed_count;
      }
    for (int v = 0; v < m; ++v)
      if (!removed[j][v]) result.kept[j].push_back(v);
  }

  for (int j = 0; j < k; ++j) {
    const auto& kept_l = result.kept[j];
    const auto& kept_r = result.kept[(j + 1) % k];
    BipartitePair trimmed(static_cast<int>(kept_l.size()), static_cast<int>(kept_r.size()));
    std::vector<int> rindex(m, -1);
    for (size_t i = 0; i < kept_r.size(); ++i) rindex[kept_r[i]] = static_cast<int>(i);
    for (size_t i = 0; i < kept_l.size(); ++i)
      for (int b : cycle_pairs[j].neighbours_left(kept_l[i]))
        if (rindex[b] >= 0) trimmed.add_edge(static_cast<int>(i), rindex[b]);
    result.pairs.push_back(std::move(trimmed));
  }
  return result;
}

BipartitePair bounded_degree_subgraph(const BipartitePair& pair, const Rational& d0) {
  if (pair.left_size() != pair.right_size())
    throw std::invalid_argument("bounded_degree_subgraph: classes must have equal size");
  const int m = pair.left_size();
  const long long cap = (d0 * Rational(m)).floor();
  if (cap < 1) throw std::invalid_argument("bounded_degree_subgraph: d0*m < 1");
  auto matchings = peel_matchings(pair, static_cast<int>(cap));
  BipartitePair H(m, m);
  long long edges = 0;
  for (const auto& matching : matchings)
    for (const auto& [a, b] : matching) {
      H.add_edge(a, b);
      ++edges;
    }
  // average degree >= d0*m/8, i.e. 8*edges >= d0*m^2, exact
  if (edges * 8 * d0.den() < d0.num() * static_cast<long long>(m) * m)
    throw std::runtime_error("bounded_degree_subgraph: average-degree floor unreachable");
  return H;
}

}  // namespace hamdec
