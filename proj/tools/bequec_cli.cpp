// bequec: synthetic experiments and clustering of user graphs from queried edge blocks.

#include "bequec/data_io.hpp"
#include "bequec/errors.hpp"
#include "bequec/experiment.hpp"
#include "bequec/query_plan.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace bequec;

struct ConfigFlags {
  std::string config_path;
  Index n = 0;
  int k = 0, l = 0, trials = 0;
  std::vector<double> nu;
  double eta = 0.0, b_diag_min = 0.0;
  std::uint64_t seed = 0;
  std::string mode, plan, extraction, membership;
  std::string out, format = "csv";

  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with ExperimentConfig fields")->check(CLI::ExistingFile);
    opts = {
        app->add_option("--n", n, "number of nodes"),
        app->add_option("--k", k, "number of clusters"),
        app->add_option("--l", l, "number of node groups"),
        app->add_option("--nu", nu, "Dirichlet concentration, comma separated")->delimiter(','),
        app->add_option("--eta", eta, "upper bound of off-diagonal B entries"),
        app->add_option("--trials", trials, "number of trials"),
        app->add_option("--seed", seed, "base seed"),
        app->add_option("--mode", mode, "ideal | binary"),
        app->add_option("--plan", plan, "diagonal | plan JSON path"),
        app->add_option("--extraction", extraction, "direct | constrained"),
        app->add_option("--membership", membership, "dirichlet | hard"),
        app->add_option("--b-diag-min", b_diag_min, "lower end of the B diagonal range"),
    };
    app->add_option("--out", out, "results file (default: stdout)");
    app->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  }

  bool given(std::size_t i) const { return opts[i]->count() > 0; }

  // JSON config first, then command-line flags on top.
  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      c = config_from_json(text.str(), c);
    }
    if (given(0)) c.n = n;
    if (given(1)) c.k = k;
    if (given(2)) c.l = l;
    if (given(3)) c.nu = nu;
    if (given(4)) c.eta = eta;
    if (given(5)) c.trials = trials;
    if (given(6)) c.seed = seed;
    if (given(7)) c.mode = parse_mode(mode);
    if (given(8)) c.plan = plan;
    if (given(9)) c.extraction = parse_extraction(extraction);
    if (given(10)) c.membership = parse_membership(membership);
    if (given(11)) c.b_diag_min = b_diag_min;
    return c;
  }
};

int report_run(const RunResult& run, const ExperimentConfig& config, const ConfigFlags& flags) {
  const auto fmt = parse_result_format(flags.format);
  const auto header = config_to_json(config);
  if (flags.out.empty()) {
    std::cout << format_results(run.records, fmt, header);
  } else {
    write_results(run.records, flags.out, fmt, header);
  }
  std::cerr << "trials completed: " << run.trials_requested - static_cast<int>(run.failures.size()) << "/"
            << run.trials_requested << '\n';
  for (const auto& a : run.aggregates) {
    std::cerr << std::left << std::setw(12) << a.metric << " mean " << std::setprecision(6) << a.mean
              << "  sd " << a.stddev << "  n " << a.count << '\n';
  }
  for (const auto& f : run.failures) std::cerr << "trial " << f.trial << " failed: " << f.message << '\n';
  return run.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bequec: mixed-membership clustering from queried edge blocks"};
  app.require_subcommand(1);

  ConfigFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "synthetic experiment over several trials");
  synth_flags.attach(synth);

  ConfigFlags sweep_flags;
  std::vector<double> rates = {0.0, 0.10, 0.15, 0.20};
  auto* sweep = app.add_subcommand("error-sweep", "synthetic experiment with annotation flips at several rates");
  sweep_flags.attach(sweep);
  sweep->add_option("--rates", rates, "flip rates, comma separated")->delimiter(',');

  ClusterOptions cluster_opts;
  std::string cluster_out, truth_path;
  std::uint64_t shuffle_seed = 0;
  auto* cluster = app.add_subcommand("cluster", "estimate memberships of an edge-list graph");
  cluster->add_option("--graph", cluster_opts.graph_path, "edge list file")->required()->check(CLI::ExistingFile);
  cluster->add_option("--k", cluster_opts.k, "number of clusters")->required();
  cluster->add_option("--l", cluster_opts.l, "number of node groups for the diagonal plan");
  cluster->add_option("--plan", cluster_opts.plan, "diagonal | plan JSON path");
  std::string cluster_extraction = "constrained";
  cluster->add_option("--extraction", cluster_extraction, "direct | constrained");
  auto* truth_opt = cluster->add_option("--truth", truth_path, "ground-truth CSV")->check(CLI::ExistingFile);
  auto* shuffle_opt = cluster->add_option("--shuffle-seed", shuffle_seed, "randomize node order of the diagonal plan");
  cluster->add_option("--out", cluster_out, "membership CSV (default: stdout)");

  double eps = 0.1;
  std::vector<std::string> nu_rows;
  auto* gfun = app.add_subcommand("gfun", "tabulate the separability bound G(eps, nu)");
  gfun->add_option("--eps", eps, "separability radius")->required();
  gfun->add_option("--nu", nu_rows, "concentration vector a,b,c (repeatable)")->required();

  Index plan_n = 0;
  int plan_l = 0, plan_k = 1;
  std::string pattern = "diagonal", plan_out;
  auto* plan = app.add_subcommand("plan", "build a query plan and report its queried fraction");
  plan->add_option("--n", plan_n, "number of nodes")->required();
  plan->add_option("--l", plan_l, "number of groups")->required();
  plan->add_option("--k", plan_k, "number of clusters, for the group-size check");
  plan->add_option("--pattern", pattern, "diagonal | chain:l1-m1,l2-m2,... (1-based)");
  plan->add_option("--out", plan_out, "plan JSON file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto config = synth_flags.resolve();
      return report_run(run_synth(config), config, synth_flags);
    }
    if (sweep->parsed()) {
      auto config = sweep_flags.resolve();
      return report_run(run_error_sweep(config, rates), config, sweep_flags);
    }
    if (cluster->parsed()) {
      cluster_opts.extraction = parse_extraction(cluster_extraction);
      if (truth_opt->count()) cluster_opts.truth_path = truth_path;
      if (shuffle_opt->count()) cluster_opts.shuffle_seed = shuffle_seed;
      const auto result = run_cluster(cluster_opts);
      if (cluster_out.empty()) {
        std::cout << std::setprecision(17);
        for (Index i = 0; i < result.m_hat.cols(); ++i) {
          for (Index c = 0; c < result.m_hat.rows(); ++c) std::cout << (c ? "," : "") << result.m_hat(c, i);
          std::cout << '\n';
        }
      } else {
        save_membership_csv(result.m_hat, cluster_out);
      }
      std::cerr << "queried fraction " << result.queried_fraction << ", runtime " << result.runtime_s << " s\n";
      for (const auto& [name, value] : result.metrics) std::cerr << name << " " << value << '\n';
      return 0;
    }
    if (gfun->parsed()) {
      std::vector<std::vector<double>> nus;
      for (const auto& row : nu_rows) {
        std::vector<double> nu;
        std::istringstream in(row);
        for (std::string v; std::getline(in, v, ',');) nu.push_back(std::stod(v));
        nus.push_back(std::move(nu));
      }
      std::cout << "nu\tG\n";
      for (const auto& r : g_table(eps, nus)) {
        for (std::size_t i = 0; i < r.nu.size(); ++i) std::cout << (i ? "," : "") << r.nu[i];
        std::cout << '\t' << std::setprecision(6) << r.value << '\n';
      }
      return 0;
    }
    if (plan->parsed()) {
      const auto p = plan_from_pattern(plan_n, plan_l, pattern);
      const auto report = validate_plan(p, plan_k);
      if (plan_out.empty()) {
        std::cout << plan_to_json(p) << '\n';
      } else {
        save_plan(p, plan_out);
      }
      std::cerr << "queried pairs " << queried_pair_count(p) << ", fraction " << std::setprecision(6)
                << queried_fraction(p) << '\n';
      std::cerr << "validation: " << report.summary() << '\n';
      return report.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
