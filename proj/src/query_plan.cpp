#include "bequec/query_plan.hpp"

#include "bequec/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace bequec {

Partition::Partition(std::vector<int> assignment, int num_groups)
    : assignment_(std::move(assignment)), groups_(static_cast<std::size_t>(std::max(num_groups, 0))) {
  if (num_groups < 1) throw PlanError("partition needs at least one group");
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const int g = assignment_[i];
    if (g < 0 || g >= num_groups) {
      throw PlanError("node " + std::to_string(i) + " has group " + std::to_string(g) +
                      " outside [0, " + std::to_string(num_groups) + ")");
    }
    groups_[static_cast<std::size_t>(g)].push_back(static_cast<Index>(i));
  }
  for (int g = 0; g < num_groups; ++g) {
    if (groups_[static_cast<std::size_t>(g)].empty()) {
      throw PlanError("group " + std::to_string(g + 1) + " is empty");
    }
  }
}

Partition Partition::contiguous(Index n, int l, std::span<const Index> node_order) {
  if (l < 1 || n < l) {
    throw PlanError("cannot split " + std::to_string(n) + " nodes into " + std::to_string(l) +
                    " nonempty groups");
  }
  if (!node_order.empty() && static_cast<Index>(node_order.size()) != n) {
    throw PlanError("node order length does not match node count");
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  const Index base = n / l;
  const Index extra = n % l;
  Index pos = 0;
  for (int g = 0; g < l; ++g) {
    const Index size = base + (g < extra ? 1 : 0);
    for (Index j = 0; j < size; ++j, ++pos) {
      const Index node = node_order.empty() ? pos : node_order[static_cast<std::size_t>(pos)];
      if (node < 0 || node >= n || assignment[static_cast<std::size_t>(node)] != -1) {
        throw PlanError("node order is not a permutation");
      }
      assignment[static_cast<std::size_t>(node)] = g;
    }
  }
  return Partition(std::move(assignment), l);
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < messages.size(); ++i) out << (i ? "; " : "") << messages[i];
  return out.str();
}

QueryPlan::QueryPlan(Partition partition, std::vector<BlockPair> anchors)
    : partition_(std::move(partition)), anchors_(std::move(anchors)) {
  const int l = partition_.num_groups();
  for (const auto& a : anchors_) {
    if (a.row < 0 || a.row >= l || a.col < 0 || a.col >= l) {
      throw PlanError("anchor (" + std::to_string(a.row + 1) + "," + std::to_string(a.col + 1) +
                      ") references a group outside [1.." + std::to_string(l) + "]");
    }
  }
}

std::vector<BlockPair> QueryPlan::stitches() const {
  std::vector<BlockPair> out;
  for (std::size_t r = 0; r + 1 < anchors_.size(); ++r) {
    out.push_back({anchors_[r + 1].row, anchors_[r].col});
  }
  return out;
}

std::vector<BlockPair> QueryPlan::queried_blocks() const {
  std::set<BlockPair> seen;
  auto add = [&](BlockPair p) { seen.insert({std::min(p.row, p.col), std::max(p.row, p.col)}); };
  for (const auto& a : anchors_) add(a);
  for (const auto& s : stitches()) add(s);
  return {seen.begin(), seen.end()};
}

QueryPlan diagonal_plan(Index n, int l, std::span<const Index> node_order) {
  if (l < 2) throw PlanError("diagonal plan needs at least 2 groups (got " + std::to_string(l) + ")");
  if (l > n) throw PlanError("more groups than nodes");
  std::vector<BlockPair> anchors;
  for (int r = 0; r < l; ++r) anchors.push_back({r, r});
  return QueryPlan(Partition::contiguous(n, l, node_order), std::move(anchors));
}

QueryPlan chain_plan_from_pairs(Partition partition, std::vector<BlockPair> anchors) {
  QueryPlan plan(std::move(partition), std::move(anchors));
  const auto report = validate_plan(plan, 1);
  if (!report.ok()) throw PlanError("invalid query chain: " + report.summary());
  return plan;
}

ValidationReport validate_plan(const QueryPlan& plan, int k) {
  ValidationReport report;
  const int l = plan.num_groups();
  const auto& anchors = plan.anchors();

  if (static_cast<int>(anchors.size()) != l) {
    report.chain = false;
    report.messages.push_back("chain: expected " + std::to_string(l) + " anchor blocks, got " +
                              std::to_string(anchors.size()));
  }
  if (l < 2) {
    report.chain = false;
    report.messages.push_back("chain: at least 2 groups are needed to stitch");
  }
  std::vector<int> seen(static_cast<std::size_t>(l), 0);
  for (const auto& a : anchors) ++seen[static_cast<std::size_t>(a.row)];
  for (int g = 0; g < l; ++g) {
    if (seen[static_cast<std::size_t>(g)] != 1) {
      report.coverage = false;
      report.messages.push_back("coverage: group " + std::to_string(g + 1) + " appears " +
                                std::to_string(seen[static_cast<std::size_t>(g)]) +
                                " times in the anchor sequence");
    }
  }
  for (std::size_t r = 0; r + 1 < anchors.size(); ++r) {
    if (anchors[r + 1].row == anchors[r].row) {
      report.chain = false;
      report.messages.push_back("chain: l_" + std::to_string(r + 2) + " == l_" +
                                std::to_string(r + 1));
    }
  }
  for (int g = 0; g < l; ++g) {
    if (plan.partition().group_size(g) < k) {
      report.group_size = false;
      report.messages.push_back("group too small: |S_" + std::to_string(g + 1) +
                                "| = " + std::to_string(plan.partition().group_size(g)) +
                                " < K = " + std::to_string(k));
    }
  }
  return report;
}

std::uint64_t queried_pair_count(const QueryPlan& plan) {
  std::uint64_t count = 0;
  for (const auto& b : plan.queried_blocks()) {
    const auto a = static_cast<std::uint64_t>(plan.partition().group_size(b.row));
    const auto c = static_cast<std::uint64_t>(plan.partition().group_size(b.col));
    count += b.row == b.col ? a * (a - 1) / 2 : a * c;
  }
  return count;
}

double queried_fraction(const QueryPlan& plan) {
  const auto n = static_cast<double>(plan.num_nodes());
  if (n < 2) return 1.0;
  return static_cast<double>(queried_pair_count(plan)) / (n * (n - 1) / 2);
}

std::string plan_to_json(const QueryPlan& plan) {
  nlohmann::json j;
  j["L"] = plan.num_groups();
  std::vector<int> assignment = plan.partition().assignment();
  for (auto& g : assignment) ++g;
  j["assignment"] = assignment;
  auto anchors = nlohmann::json::array();
  for (const auto& a : plan.anchors()) anchors.push_back({a.row + 1, a.col + 1});
  j["anchors"] = anchors;
  return j.dump();
}

QueryPlan plan_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
  try {
    const int l = j.at("L").get<int>();
    std::vector<int> assignment = j.at("assignment").get<std::vector<int>>();
    for (auto& g : assignment) --g;
    std::vector<BlockPair> anchors;
    for (const auto& a : j.at("anchors")) {
      if (!a.is_array() || a.size() != 2) throw ParseError("plan JSON: anchors must be [l, m] pairs");
      anchors.push_back({a[0].get<int>() - 1, a[1].get<int>() - 1});
    }
    return QueryPlan(Partition(std::move(assignment), l), std::move(anchors));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
}

void save_plan(const QueryPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan to " + path);
  out << plan_to_json(plan) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

QueryPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return plan_from_json(buf.str());
}

}  // namespace bequec
