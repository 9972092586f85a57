#include "hamdec/expander.hpp"

#include <bit>
#include <stdexcept>

#include "hamdec/rng.hpp"

namespace hamdec {

void ExpanderParams::validate() const {
  if (!(Rational(0) < nu && nu <= tau && tau < Rational(1)))
    throw std::invalid_argument("ExpanderParams: need 0 < nu <= tau < 1");
}

std::vector<Vertex> robust_out_neighbourhood(const Multidigraph& G, const std::vector<Vertex>& S,
                                             const Rational& nu) {
  const int n = G.vertex_count();
  std::vector<char> in_s(n, 0);
  for (Vertex v : S) {
    if (v < 0 || v >= n) throw std::out_of_range("robust_out_neighbourhood: S not within V(G)");
    in_s[v] = 1;
  }
  std::vector<Vertex> result;
  for (int v = 0; v < n; ++v) {
    long long count = 0;
    for (const auto& [u, m] : G.in(v))
      if (in_s[u]) ++count;  // distinct inneighbours, multiplicity ignored
    // count >= nu*n, compared exactly
    if (count * nu.den() >= nu.num() * static_cast<long long>(n)) result.push_back(v);
  }
  return result;
}

namespace {

// |RN^+_{nu}(S)| for S given as a bitmask, using per-vertex inneighbour masks.
int rn_size(const std::vector<uint32_t>& in_mask, uint32_t s_mask, long long nu_num,
            long long nu_den, int n) {
  int size = 0;
  for (int v = 0; v < n; ++v) {
    int cnt = std::popcount(in_mask[v] & s_mask);
    if (static_cast<long long>(cnt) * nu_den >= nu_num * n) ++size;
  }
  return size;
}

}  // namespace

ExpanderVerdict is_robust_outexpander(const Multidigraph& G, const ExpanderParams& params,
                                      ExpanderMode mode, int samples, uint64_t seed,
                                      int exhaustive_cap) {
  params.validate();
  const int n = G.vertex_count();
  const Rational& nu = params.nu;
  const Rational& tau = params.tau;

  // size window: tau*n <= t <= (1-tau)*n, exact
  auto size_ok = [&](int t) {
    bool lo = static_cast<long long>(t) * tau.den() >= tau.num() * static_cast<long long>(n);
    Rational ub = (Rational(1) - tau) * Rational(n);
    bool hi = Rational(t) <= ub;
    return lo && hi;
  };
  // |RN| >= |S| + nu*n, exact: (rn - t) >= nu*n
  auto expansion_ok = [&](int rn, int t) {
    return static_cast<long long>(rn - t) * nu.den() >= nu.num() * static_cast<long long>(n);
  };

  ExpanderVerdict verdict{ExpanderVerdict::Kind::Holds, {}, 0};

  if (mode == ExpanderMode::Exhaustive) {
    if (n > exhaustive_cap)
      throw std::invalid_argument("is_robust_outexpander: exhaustive mode above configured cap");
    std::vector<uint32_t> in_mask(n, 0);
    for (int v = 0; v < n; ++v)
      for (const auto& [u, m] : G.in(v)) in_mask[v] |= (1u << u);
    for (int t = 0; t <= n; ++t) {
      if (!size_ok(t)) continue;
      // enumerate masks of popcount t in increasing numeric order
      if (t == 0) {
        ++verdict.subsets_checked;
        if (!expansion_ok(rn_size(in_mask, 0, nu.num(), nu.den(), n), 0)) {
          verdict.kind = ExpanderVerdict::Kind::Counterexample;
          return verdict;
        }
        continue;
      }
      uint32_t mask = (t == 32) ? ~0u : ((1u << t) - 1);
      const uint32_t limit = (n == 32) ? ~0u : ((1u << n) - 1);
      while (mask <= limit) {
        ++verdict.subsets_checked;
        if (!expansion_ok(rn_size(in_mask, mask, nu.num(), nu.den(), n), t)) {
          verdict.kind = ExpanderVerdict::Kind::Counterexample;
          for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) verdict.witness.push_back(v);
          return verdict;
        }
        // next mask with same popcount (Gosper)
        uint32_t c = mask & -mask;
        uint32_t r = mask + c;
        if (r == 0) break;
        mask = (((r ^ mask) >> 2) / c) | r;
      }
    }
    verdict.kind = ExpanderVerdict::Kind::Holds;
    return verdict;
  }

  // Sampled: falsifier only.
  Rng rng(seed);
  int lo = n, hi = -1;
  for (int t = 0; t <= n; ++t)
    if (size_ok(t)) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  verdict.kind = ExpanderVerdict::Kind::NoViolationFound;
  if (hi < lo) return verdict;  // empty window: nothing to falsify
  std::vector<char> in_s(n);
  for (int k = 0; k < samples; ++k) {
    int t = rng.range(lo, hi);
    std::vector<int> perm = rng.permutation(n);
    std::fill(in_s.begin(), in_s.end(), 0);
    std::vector<Vertex> S(perm.begin(), perm.begin() + t);
    for (Vertex v : S) in_s[v] = 1;
    ++verdict.subsets_checked;
    int rn = 0;
    for (int v = 0; v < n; ++v) {
      long long cnt = 0;
      for (const auto& [u, m] : G.in(v))
        if (in_s[u]) ++cnt;
      if (cnt * nu.den() >= nu.num() * static_cast<long long>(n)) ++rn;
    }
    if (!expansion_ok(rn, t)) {
      verdict.kind = ExpanderVerdict::Kind::Counterexample;
      std::sort(S.begin(), S.end());
      verdict.witness = std::move(S);
      return verdict;
    }
  }
  return verdict;
}

}  // namespace hamdec
