#include "bequec/errors.hpp"
#include "bequec/experiment.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <omp.h>

#include <algorithm>
#include <fstream>
#include <numeric>

using namespace bequec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 400;
  c.k = 3;
  c.l = 5;
  c.trials = 4;
  c.seed = 42;
  return c;
}

std::vector<double> values_of(const RunResult& r, const std::string& metric) {
  std::vector<double> out;
  for (const auto& rec : r.records)
    if (rec.metric == metric) out.push_back(rec.value);
  return out;
}

}  // namespace

TEST_CASE("config validation and JSON") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective_nu() == std::vector<double>(3, 1.0 / 3));

  auto bad = c;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.k = 100;
  CHECK_THROWS_AS(bad.validate(), PlanError);
  bad = c;
  bad.nu = {0.2, 0.2};
  CHECK_THROWS_AS(bad.validate(), ParameterError);

  c.mode = ObservationMode::ideal;
  c.extraction = Extraction::direct;
  c.membership = MembershipModel::hard;
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));

  const auto partial = config_from_json("{\"n\": 900, \"mode\": \"ideal\"}", c);
  CHECK(partial.n == 900);
  CHECK(partial.k == c.k);
  CHECK_THROWS_AS(config_from_json("{\"bogus\": 1}"), ParseError);
  CHECK_THROWS_AS(config_from_json("{\"mode\": \"fuzzy\"}"), ParameterError);
  CHECK_THROWS_AS(parse_extraction("lasso"), ParameterError);
}

TEST_CASE("synthetic runs are deterministic and schedule independent") {
  auto c = small_config();
  c.trials = 1;
  const auto a = run_synth(c);
  const auto b = run_synth(c);
  REQUIRE(a.records.size() == 4);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].metric == b.records[i].metric);
    CHECK(a.records[i].value == b.records[i].value);
  }

  c.trials = 6;
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto serial = run_synth(c);
  omp_set_num_threads(4);
  const auto parallel = run_synth(c);
  omp_set_num_threads(threads);
  CHECK(values_of(serial, "MSE") == values_of(parallel, "MSE"));
  CHECK(values_of(serial, "Dist") == values_of(parallel, "Dist"));
  for (std::size_t i = 0; i < serial.records.size(); ++i) CHECK(serial.records[i].seed == parallel.records[i].seed);
}

TEST_CASE("ideal synthetic run is exact") {
  auto c = small_config();
  c.mode = ObservationMode::ideal;
  const auto r = run_synth(c);
  CHECK(r.all_ok());
  CHECK(r.aggregate("Dist")->mean <= 1e-8);
  CHECK(r.aggregate("MSE")->count == c.trials);
}

TEST_CASE("aggregates match the records") {
  const auto r = run_synth(small_config());
  for (const auto& a : r.aggregates) {
    const auto v = values_of(r, a.metric);
    CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) / v.size() - a.mean) <= 1e-12);
  }
}

TEST_CASE("failing trials are recorded and skipped") {
  // tiny groups with hard labels: some groups miss a cluster and the stack loses rank
  ExperimentConfig c;
  c.n = 30;
  c.k = 5;
  c.l = 3;
  c.trials = 20;
  c.mode = ObservationMode::ideal;
  c.membership = MembershipModel::hard;
  c.eta = 0.0;
  c.b_diag_min = 1.0;
  const auto r = run_synth(c);
  CHECK_FALSE(r.all_ok());
  CHECK(r.failures.size() < 20);
  CHECK(r.aggregate("Dist")->count == 20 - static_cast<int>(r.failures.size()));
}

TEST_CASE("error sweep") {
  ExperimentConfig c;
  c.n = 450;
  c.k = 3;
  c.l = 5;
  c.trials = 4;
  c.membership = MembershipModel::hard;
  c.eta = 0.0;
  c.b_diag_min = 1.0;
  const std::vector<double> rates = {0.0, 0.5};
  const auto sweep = run_error_sweep(c, rates);
  const auto synth = run_synth(c);
  CHECK(values_of(sweep, "MSE@0") == values_of(synth, "MSE"));
  CHECK(values_of(sweep, "Dist@0") == values_of(synth, "Dist"));
  CHECK(values_of(sweep, "ACC@0") == values_of(synth, "ACC"));
  CHECK(sweep.aggregate("ACC@0.5")->mean <= 100.0 / 3 + 15.0);

  auto ideal = c;
  ideal.mode = ObservationMode::ideal;
  CHECK_THROWS_AS(run_error_sweep(ideal, rates), ParameterError);
  const std::vector<double> bad = {1.2};
  CHECK_THROWS_AS(run_error_sweep(c, bad), ParameterError);
}

TEST_CASE("cluster a planted graph") {
  // three cliques, labels shuffled
  const Index n = 90;
  std::vector<int> labels(n);
  for (Index i = 0; i < n; ++i) labels[i] = int(i % 3);
  rng::Engine eng(5);
  std::shuffle(labels.begin(), labels.end(), eng);
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (labels[i] == labels[j]) edges.emplace_back(i, j);
  const auto graph_path = testing::tmp_path("planted_graph.txt");
  save_edge_list(EdgeList(n, edges), graph_path);
  const auto truth_path = testing::tmp_path("planted_truth.csv");
  {
    std::ofstream out(truth_path);
    for (int l : labels) out << l + 1 << '\n';
  }

  ClusterOptions opts;
  opts.graph_path = graph_path;
  opts.k = 3;
  opts.l = 4;
  const auto plain = run_cluster(opts);
  CHECK(plain.metrics.empty());
  CHECK(plain.m_hat.cols() == n);
  CHECK(plain.queried_fraction > 0.0);

  opts.truth_path = truth_path;
  opts.shuffle_seed = 3;
  const auto scored = run_cluster(opts);
  CHECK(scored.metrics.at("ACC") == 100.0);
  CHECK(scored.metrics.at("NMI") == doctest::Approx(1.0));

  opts.k = 40;
  CHECK_THROWS_AS(run_cluster(opts), PlanError);
}

TEST_CASE("G table and plan patterns") {
  const auto rows = g_table(0.1, {{0.5, 0.5, 0.5}, {3, 3, 3}});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == doctest::Approx(0.045).epsilon(0.03));

  CHECK(plan_from_pattern(100, 10, "diagonal").anchors() == diagonal_plan(100, 10).anchors());
  const auto chain = plan_from_pattern(60, 3, "chain:1-2,2-3,3-3");
  CHECK(chain.anchors() == std::vector<BlockPair>{{0, 1}, {1, 2}, {2, 2}});
  CHECK_THROWS_AS(plan_from_pattern(60, 3, "chain:1-2,1-3,3-3"), PlanError);
  CHECK_THROWS_AS(plan_from_pattern(60, 3, "chain:1-x"), PlanError);
  CHECK_THROWS_AS(plan_from_pattern(60, 3, "spiral"), PlanError);
}
