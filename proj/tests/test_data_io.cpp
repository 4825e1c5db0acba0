#include "bequec/data_io.hpp"
#include "bequec/errors.hpp"
#include "bequec/experiment.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>

using namespace bequec;
using testing::tmp_path;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = tmp_path(name);
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const std::string& path) {
  try {
    load_edge_list(path);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

EdgeList random_graph(Index n, double p, std::uint64_t seed) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (rng::pair_uniform(seed, std::uint64_t(i), std::uint64_t(j)) < p) edges.emplace_back(i, j);
  return EdgeList(n, edges);
}

}  // namespace

TEST_CASE("edge list loading") {
  const auto g = load_edge_list(write_file("small.txt", "N 3\n0 1\n1 2"));
  CHECK(g.n() == 3);
  CHECK(g.edges().size() == 2);
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));

  const auto c = load_edge_list(write_file("comments.txt", "# header\n\n3 1  # trailing\n0\t4\n"));
  CHECK(c.n() == 5);
  CHECK(c.edges() == std::vector<std::pair<Index, Index>>{{0, 4}, {1, 3}});

  CHECK(error_of(write_file("loop.txt", "N 4\n0 1\n2 2\n")).find(":3:") != std::string::npos);
  CHECK(error_of(write_file("loop.txt", "N 4\n0 1\n2 2\n")).find("self-loop") != std::string::npos);
  CHECK(error_of(write_file("dup.txt", "0 1\n1 2\n1 0\n")).find(":3:") != std::string::npos);
  CHECK(error_of(write_file("range.txt", "N 3\n0 3\n")).find("out of range") != std::string::npos);
  CHECK(error_of(write_file("junk.txt", "0 1 2\n")).find(":1:") != std::string::npos);
  CHECK(error_of(write_file("neg.txt", "0 -1\n")).find("negative") != std::string::npos);
  CHECK_THROWS_AS(load_edge_list(tmp_path("does_not_exist.txt")), ParseError);
}

TEST_CASE("edge list round trip") {
  const auto g = random_graph(40, 0.2, 3);
  const auto path = tmp_path("roundtrip.txt");
  save_edge_list(g, path);
  const auto back = load_edge_list(path);
  CHECK(back.n() == g.n());
  CHECK(back.edges() == g.edges());

  const EdgeList isolated(10, {{2, 3}});
  save_edge_list(isolated, path);
  CHECK(load_edge_list(path).n() == 10);
}

TEST_CASE("block extraction") {
  SUBCASE("complete graph") {
    std::vector<std::pair<Index, Index>> all;
    for (Index i = 0; i < 12; ++i)
      for (Index j = i + 1; j < 12; ++j) all.emplace_back(i, j);
    const auto blocks = extract_blocks(EdgeList(12, all), diagonal_plan(12, 3));
    for (const auto& [key, b] : blocks) {
      if (key.row == key.col) CHECK(b.entries == Matrix(Matrix::Ones(4, 4) - Matrix::Identity(4, 4)));
      else CHECK(b.entries == Matrix::Ones(4, 4));
    }
  }
  SUBCASE("empty graph") {
    const auto blocks = extract_blocks(EdgeList(12, {}), diagonal_plan(12, 3));
    for (const auto& [key, b] : blocks) CHECK(b.entries.isZero());
  }
  SUBCASE("dense adjacency oracle and query count") {
    const Index n = 500;
    const auto g = random_graph(n, 0.1, 5);
    Matrix dense = Matrix::Zero(n, n);
    for (const auto& [a, b] : g.edges()) dense(a, b) = dense(b, a) = 1.0;
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    rng::Engine eng(1);
    std::shuffle(order.begin(), order.end(), eng);
    const auto plan = diagonal_plan(n, 7, order);
    EdgeOracle oracle(g);
    const auto blocks = extract_blocks(oracle, plan);
    CHECK(oracle.queries() == queried_pair_count(plan));
    CHECK(blocks.size() == plan.queried_blocks().size());
    for (const auto& [key, b] : blocks) {
      const auto& r = plan.partition().group(key.row);
      const auto& c = plan.partition().group(key.col);
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) CHECK(b.entries(Index(i), Index(j)) == dense(r[i], c[j]));
    }
  }
  CHECK_THROWS_AS(extract_blocks(EdgeList(12, {}), diagonal_plan(13, 3)), PlanError);
}

TEST_CASE("annotation errors") {
  const auto g = random_graph(300, 0.3, 7);
  const auto plan = diagonal_plan(300, 3);
  const auto clean = extract_blocks(g, plan);

  const auto same = inject_annotation_errors(clean, 0.0, 1);
  for (const auto& [key, b] : clean) CHECK(same.get(key.row, key.col).entries == b.entries);

  const auto all = inject_annotation_errors(clean, 1.0, 1);
  for (const auto& [key, b] : clean) {
    Matrix expected = Matrix::Ones(b.entries.rows(), b.entries.cols()) - b.entries;
    if (key.row == key.col) expected.diagonal().setZero();
    CHECK(all.get(key.row, key.col).entries == expected);
  }

  const auto some = inject_annotation_errors(clean, 0.15, 2);
  double flipped = 0.0, pairs = 0.0;
  for (const auto& [key, b] : clean) {
    const Matrix& f = some.get(key.row, key.col).entries;
    const Matrix diff = (f - b.entries).cwiseAbs();
    if (key.row == key.col) {
      CHECK(f == f.transpose());
      CHECK(f.diagonal().isZero());
      const Index s = b.entries.rows();
      flipped += diff.sum() / 2;
      pairs += s * (s - 1) / 2.0;
    } else {
      flipped += diff.sum();
      pairs += double(diff.size());
    }
  }
  CHECK(std::abs(flipped / pairs - 0.15) <= 3 * std::sqrt(0.15 * 0.85 / pairs));

  BlockSet real;
  real.insert({0, 0, Matrix::Constant(3, 3, 0.5)});
  CHECK_THROWS_AS(inject_annotation_errors(real, 0.1, 1), ParameterError);
  CHECK_THROWS_AS(inject_annotation_errors(clean, 1.5, 1), ParameterError);
}

TEST_CASE("ground truth files") {
  const auto labels = load_ground_truth(write_file("labels.csv", "1\n3\n2\n3\n"));
  REQUIRE(labels.labels.has_value());
  CHECK(*labels.labels == std::vector<int>{0, 2, 1, 2});
  CHECK(labels.k == 3);

  const auto soft = load_ground_truth(write_file("soft.csv", "a,b\n0.2,0.8\n0.5,0.5\n"));
  REQUIRE(soft.memberships.has_value());
  CHECK(soft.memberships->cols() == 2);
  CHECK_FALSE(soft.renormalized);

  std::vector<std::string> warnings;
  set_warning_handler([&](const std::string& m) { warnings.push_back(m); });
  const auto off = load_ground_truth(write_file("off.csv", "1,1\n0.5,0.5\n"));
  set_warning_handler([](const std::string& m) { std::cerr << "warning: " << m << '\n'; });
  CHECK(off.renormalized);
  CHECK(warnings.size() == 1);
  CHECK((*off.memberships)(0, 0) == 0.5);

  CHECK_THROWS_AS(load_ground_truth(write_file("bad.csv", "0.1,0.9\n0.3\n")), ParseError);
  CHECK_THROWS_AS(load_ground_truth(write_file("neg.csv", "-0.1,1.1\n")), ParseError);
  CHECK_THROWS_AS(load_ground_truth(write_file("zero_label.csv", "0\n1\n")), ParseError);

  const Matrix m = testing::dirichlet(3, 10, 0.5, 3);
  save_membership_csv(m, tmp_path("m.csv"));
  const auto back = load_ground_truth(tmp_path("m.csv"));
  CHECK((*back.memberships - m).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("results files") {
  std::vector<ResultRecord> records;
  for (int t = 0; t < 20; ++t) {
    records.push_back({std::uint64_t(1000 + t), 2000, 5, 10, 0.1, {0.2, 0.2, 0.2, 0.2, 0.2}, "MSE",
                       0.05 + 0.001 * t + 1.0 / 3.0 * 1e-7, 0.01 * t});
    records.push_back({std::uint64_t(1000 + t), 2000, 5, 10, 0.1, {0.2, 0.2, 0.2, 0.2, 0.2}, "Dist", 0.3 / (t + 1), 0.5});
  }
  for (auto fmt : {ResultFormat::csv, ResultFormat::json}) {
    const auto path = tmp_path(fmt == ResultFormat::csv ? "results.csv" : "results.json");
    write_results(records, path, fmt, "{\"n\": 2000}");
    CHECK(read_results(path, fmt) == records);
  }
  CHECK(format_results({}, ResultFormat::csv) == "seed,N,K,L,eta,nu,metric,value,runtime_s\n");
  CHECK(format_results(records, ResultFormat::csv, "{\"k\":5}").rfind("# config: {\"k\":5}\n", 0) == 0);

  const auto agg = aggregate_records(records);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].metric == "MSE");
  double mean = 0.0;
  for (const auto& r : read_results(tmp_path("results.csv"), ResultFormat::csv))
    if (r.metric == "MSE") mean += r.value / 20;
  CHECK(std::abs(mean - agg[0].mean) <= 1e-12);
  CHECK(agg[0].count == 20);

  CHECK_THROWS_AS(parse_result_format("xml"), ParameterError);
  CHECK_THROWS(write_results(records, "/nonexistent/dir/out.csv", ResultFormat::csv));
}
