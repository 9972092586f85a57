// hamdec: Hamilton-decomposition machinery CLI.
//
// Subcommands: gen, check-expander, check-regular, factorize, unwind,
// merge, verify, decompose. File formats are documented in the README.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hamdec/expander.hpp"
#include "hamdec/factorflow.hpp"
#include "hamdec/hammerge.hpp"
#include "hamdec/pipeline.hpp"
#include "hamdec/regularity.hpp"
#include "hamdec/unwind.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hamdec;
  CLI::App app{"hamdec: edge-disjoint Hamilton cycles in robustly expanding digraphs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string gen_kind = "blowup", gen_reduced, gen_out = "instance", gen_density = "1/2",
              gen_alpha = "2/5";
  int gen_L = 6, gen_m = 60, gen_deg = 3, gen_n = 25;
  uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "blowup|tournament|quasirandom");
  gen->add_option("--reduced", gen_reduced, "reduced digraph JSON file (blowup)");
  gen->add_option("--L", gen_L, "cluster count (blowup)");
  gen->add_option("--m", gen_m, "cluster size (blowup)");
  gen->add_option("--d", gen_density, "pair density (blowup)");
  gen->add_option("--reduced-degree", gen_deg, "random reduced digraph degree");
  gen->add_option("--n", gen_n, "order (tournament/quasirandom)");
  gen->add_option("--alpha", gen_alpha, "edge probability (quasirandom)");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output prefix (writes <out>.graph.json etc.)");

  // check-expander
  auto* ce = app.add_subcommand("check-expander", "robust outexpander check");
  std::string ce_graph, ce_nu = "1/10", ce_tau = "1/5";
  bool ce_exhaustive = false;
  int ce_samples = 1000;
  uint64_t ce_seed = 1;
  ce->add_option("--graph", ce_graph)->required();
  ce->add_option("--nu", ce_nu);
  ce->add_option("--tau", ce_tau);
  ce->add_flag("--exhaustive", ce_exhaustive);
  ce->add_option("--samples", ce_samples);
  ce->add_option("--seed", ce_seed);

  // check-regular
  auto* cr = app.add_subcommand("check-regular", "(super)regularity check for a pair");
  std::string cr_pair, cr_eps = "1/10", cr_d = "1/2";
  bool cr_super = false, cr_exhaustive = false;
  int cr_samples = 1000;
  uint64_t cr_seed = 1;
  cr->add_option("--pair", cr_pair)->required();
  cr->add_option("--eps", cr_eps);
  cr->add_option("--d", cr_d);
  cr->add_flag("--super", cr_super);
  cr->add_flag("--exhaustive", cr_exhaustive);
  cr->add_option("--samples", cr_samples);
  cr->add_option("--seed", cr_seed);

  // factorize
  auto* fz = app.add_subcommand("factorize", "1-factorize an r-regular multidigraph");
  std::string fz_graph, fz_out = "factors.json";
  int fz_r = 1;
  fz->add_option("--graph", fz_graph)->required();
  fz->add_option("--r", fz_r)->required();
  fz->add_option("--out", fz_out);

  // unwind
  auto* uw = app.add_subcommand("unwind", "(p-1)-unwinding of p (x) C_n");
  int uw_n = 10, uw_p = 7;
  std::string uw_out = "unwinding.json";
  uw->add_option("--n", uw_n)->required();
  uw->add_option("--p", uw_p)->required();
  uw->add_option("--out", uw_out);

  // merge
  auto* mg = app.add_subcommand("merge", "matching-replacement merge of a 1-factor");
  std::string mg_ctx, mg_out = "cycle.json";
  uint64_t mg_seed = 1;
  long long mg_budget = 1000000;
  mg->add_option("--context", mg_ctx)->required();
  mg->add_option("--out", mg_out);
  mg->add_option("--seed", mg_seed);
  mg->add_option("--budget", mg_budget);

  // verify
  auto* vf = app.add_subcommand("verify", "verify Hamiltonicity and edge-disjointness");
  std::string vf_graph, vf_cycles;
  vf->add_option("--graph", vf_graph)->required();
  vf->add_option("--cycles", vf_cycles)->required();

  // decompose
  auto* dc = app.add_subcommand("decompose", "approximate Hamilton decomposition");
  std::string dc_graph, dc_partition, dc_config, dc_out = "cycles.json", dc_report = "report.json";
  uint64_t dc_seed = 0;
  bool dc_seed_set = false;
  dc->add_option("--graph", dc_graph)->required();
  dc->add_option("--partition", dc_partition)->required();
  dc->add_option("--config", dc_config);
  dc->add_option("--seed", dc_seed)->each([&](const std::string&) { dc_seed_set = true; });
  dc->add_option("--out", dc_out);
  dc->add_option("--report", dc_report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GenParams params;
      params.L = gen_L;
      params.m = gen_m;
      params.density = Rational::parse(gen_density);
      params.reduced_degree = gen_deg;
      params.n = gen_n;
      params.alpha = Rational::parse(gen_alpha);
      if (!gen_reduced.empty()) params.reduced = Multidigraph::from_json(slurp(gen_reduced));
      InstanceKind kind = InstanceKind::Blowup;
      if (gen_kind == "tournament") kind = InstanceKind::Tournament;
      else if (gen_kind == "quasirandom") kind = InstanceKind::Quasirandom;
      else if (gen_kind != "blowup") throw std::runtime_error("unknown kind " + gen_kind);
      Instance inst = generate_instance(kind, params, gen_seed);
      spit(gen_out + ".graph.json", inst.graph.to_json());
      spit(gen_out + ".partition.json", inst.partition.to_json());
      spit(gen_out + ".reduced.json", inst.reduced.to_json());
      std::cout << "wrote " << gen_out << ".graph.json (n=" << inst.graph.vertex_count()
                << ", edges=" << inst.graph.edge_count()
                << ", delta0=" << inst.graph.min_semidegree() << ")\n";
      return 0;
    }
    if (*ce) {
      Multidigraph g = Multidigraph::from_json(slurp(ce_graph));
      ExpanderParams params{Rational::parse(ce_nu), Rational::parse(ce_tau), std::nullopt, Rational(0)};
      ExpanderVerdict verdict = is_robust_outexpander(
          g, params, ce_exhaustive ? ExpanderMode::Exhaustive : ExpanderMode::Sampled, ce_samples,
          ce_seed);
      switch (verdict.kind) {
        case ExpanderVerdict::Kind::Holds:
          std::cout << "holds (" << verdict.subsets_checked << " subsets)\n";
          return 0;
        case ExpanderVerdict::Kind::NoViolationFound:
          std::cout << "no violation found in " << verdict.subsets_checked << " samples\n";
          return 0;
        case ExpanderVerdict::Kind::Counterexample: {
          std::cout << "counterexample S = {";
          for (size_t i = 0; i < verdict.witness.size(); ++i)
            std::cout << (i ? "," : "") << verdict.witness[i];
          std::cout << "}\n";
          return 1;
        }
      }
    }
    if (*cr) {
      BipartitePair pair = BipartitePair::from_json(slurp(cr_pair));
      CheckMode mode = cr_exhaustive ? CheckMode::Exhaustive : CheckMode::Sampled;
      RegularityVerdict verdict =
          cr_super ? check_superregular(pair, Rational::parse(cr_eps), Rational::parse(cr_d), mode,
                                        cr_samples, cr_seed)
                   : check_regular(pair, Rational::parse(cr_eps), mode, cr_samples, cr_seed);
      switch (verdict.kind) {
        case RegularityVerdict::Kind::Pass:
          std::cout << "pass\n";
          return 0;
        case RegularityVerdict::Kind::NoViolationFound:
          std::cout << "no violation found in " << verdict.pairs_checked << " samples\n";
          return 0;
        case RegularityVerdict::Kind::DensityViolation:
          std::cout << "density outside d +- eps\n";
          return 1;
        case RegularityVerdict::Kind::DegreeViolation:
          std::cout << "degree violation at " << (verdict.on_left ? "left" : "right") << " vertex "
                    << verdict.vertex << "\n";
          return 1;
        case RegularityVerdict::Kind::ViolatingSubpair:
          std::cout << "violating subpair |X|=" << verdict.X.size() << " |Y|=" << verdict.Y.size()
                    << "\n";
          return 1;
      }
    }
    if (*fz) {
      Multidigraph g = Multidigraph::from_json(slurp(fz_graph));
      auto factors = one_factorize(g, fz_r);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& f : factors) out.push_back(f.successor());
      spit(fz_out, out.dump());
      std::cout << "wrote " << factors.size() << " factors to " << fz_out << "\n";
      return 0;
    }
    if (*uw) {
      Unwinding result = unwind_cycle(uw_n, uw_p);
      nlohmann::json out;
      out["n"] = result.base_cycle_length;
      out["p"] = result.fold;
      out["coprime"] = result.coprime;
      out["cycles"] = result.cycles;
      out["edge_disjoint"] = result.edge_disjoint();
      out["distance_property"] = result.distance_property_holds();
      spit(uw_out, out.dump());
      std::cout << (uw_p - 1) << " cycles, edge_disjoint=" << result.edge_disjoint()
                << ", distance_property=" << result.distance_property_holds() << "\n";
      return 0;
    }
    if (*mg) {
      auto j = nlohmann::json::parse(slurp(mg_ctx));
      MergeContext ctx;
      ctx.clusters = j.at("clusters").get<std::vector<std::vector<int>>>();
      ctx.j_pairs = j.at("j_pairs").get<std::vector<int>>();
      std::map<int, BipartitePair> pairs;
      for (auto& [key, value] : j.at("pair_graphs").items())
        pairs.emplace(std::stoi(key), BipartitePair::from_json(value.dump()));
      ctx.pair_graph = [&pairs](int idx) -> BipartitePair* {
        auto it = pairs.find(idx);
        return it == pairs.end() ? nullptr : &it->second;
      };
      OneFactor factor = OneFactor::from_successor(j.at("factor").get<std::vector<int>>());
      FactorMergeResult merged = merge_factor({ctx}, factor, mg_budget, mg_seed);
      if (!merged.ok) {
        std::cout << "merge failed: " << merged.error << "\n";
        return 1;
      }
      nlohmann::json out;
      out["cycle"] = merged.hamilton.cycles()[0];
      spit(mg_out, out.dump());
      std::cout << "merged into a single cycle of length " << merged.hamilton.cycles()[0].size()
                << "\n";
      return 0;
    }
    if (*vf) {
      Multidigraph g = Multidigraph::from_json(slurp(vf_graph));
      auto j = nlohmann::json::parse(slurp(vf_cycles));
      std::vector<std::vector<Vertex>> cycles =
          j.is_array() ? j.get<std::vector<std::vector<Vertex>>>()
                       : j.at("cycles").get<std::vector<std::vector<Vertex>>>();
      std::string err = verify_cycles(g, cycles);
      if (err.empty()) {
        std::cout << "ok: " << cycles.size() << " Hamilton cycles, pairwise edge-disjoint\n";
        return 0;
      }
      std::cout << "verification failed: " << err << "\n";
      return 1;
    }
    if (*dc) {
      Instance inst;
      inst.graph = Multidigraph::from_json(slurp(dc_graph));
      inst.partition = ClusterPartition::from_json(slurp(dc_partition));
      PipelineConfig config;
      if (!dc_config.empty()) config = PipelineConfig::from_json(slurp(dc_config));
      if (dc_seed_set) config.seed = dc_seed;
      // reduced support: cluster pairs whose density clears the threshold
      const int L = inst.partition.cluster_count();
      inst.reduced = Multidigraph(std::max(1, L));
      if (L >= 2) {
        std::vector<int> cluster_of(inst.graph.vertex_count(), -1);
        for (int c = 0; c < L; ++c)
          for (int v : inst.partition.clusters[c]) cluster_of[v] = c;
        std::vector<std::vector<long long>> counts(L, std::vector<long long>(L, 0));
        for (const auto& [u, v, mult] : inst.graph.edges())
          if (cluster_of[u] >= 0 && cluster_of[v] >= 0 && cluster_of[u] != cluster_of[v])
            counts[cluster_of[u]][cluster_of[v]] += mult;
        long long mm = static_cast<long long>(inst.partition.cluster_size()) *
                       inst.partition.cluster_size();
        for (int a = 0; a < L; ++a)
          for (int b = 0; b < L; ++b)
            if (a != b && Rational(counts[a][b], mm) >= config.d) inst.reduced.add_edge(a, b);
      }
      DecomposeResult result = approx_decompose(inst, config);
      nlohmann::json out;
      out["cycles"] = result.cycles;
      spit(dc_out, out.dump());
      spit(dc_report, result.report.to_json());
      std::cout << "found " << result.report.cycle_count << " verified edge-disjoint Hamilton cycles"
                << " (delta0 " << result.report.delta0 << ", fraction "
                << result.report.achieved_fraction << ")\n";
      for (const auto& diag : result.report.slice_diagnostics) std::cout << "  " << diag << "\n";
      bool partial = false;
      for (const auto& diag : result.report.slice_diagnostics)
        if (diag.find("FAILED") != std::string::npos || diag.find("failures") != std::string::npos)
          partial = true;
      return partial ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
