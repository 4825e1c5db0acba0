#include "bequec/data_io.hpp"

#include "bequec/errors.hpp"
#include "bequec/kernels.hpp"
#include "bequec/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bequec {

EdgeList::EdgeList(Index n, std::vector<std::pair<Index, Index>> edges)
    : n_(n), edges_(std::move(edges)), neighbors_(static_cast<std::size_t>(std::max<Index>(n, 0))) {
  if (n < 0) throw ParameterError("node count must be nonnegative");
  for (auto& e : edges_) {
    if (e.first == e.second) throw ParameterError("self-loop at node " + std::to_string(e.first));
    if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n) {
      throw ParameterError("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                           ") outside [0, " + std::to_string(n) + ")");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw ParameterError("duplicate edge");
  }
  for (const auto& [a, b] : edges_) {
    neighbors_[static_cast<std::size_t>(a)].push_back(b);
    neighbors_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
}

bool EdgeList::has_edge(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  const auto& list = neighbors_[static_cast<std::size_t>(i)];
  return std::binary_search(list.begin(), list.end(), j);
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_index(const std::string& token, Index& out) {
  long long v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) return false;
  out = static_cast<Index>(v);
  return true;
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    std::istringstream ws(piece);
    std::string token;
    bool any = false;
    while (ws >> token) {
      out.push_back(token);
      any = true;
    }
    if (!any) out.emplace_back();
  }
  return out;
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && std::isfinite(out);
}

}  // namespace

EdgeList load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path);
  std::optional<Index> declared;
  std::vector<std::pair<Index, Index>> edges;
  std::vector<std::size_t> edge_lines;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_content = false;
  Index max_index = -1;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream line(strip_comment(raw));
    std::vector<std::string> tokens;
    for (std::string t; line >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (!seen_content && tokens[0] == "N") {
      Index n = 0;
      if (tokens.size() != 2 || !parse_index(tokens[1], n) || n < 0) {
        throw ParseError(where(path, line_no) + "malformed header, expected 'N <count>'");
      }
      declared = n;
      seen_content = true;
      continue;
    }
    seen_content = true;
    Index a = 0, b = 0;
    if (tokens.size() != 2 || !parse_index(tokens[0], a) || !parse_index(tokens[1], b)) {
      throw ParseError(where(path, line_no) + "expected two integer node ids, got '" + raw + "'");
    }
    if (a < 0 || b < 0) throw ParseError(where(path, line_no) + "negative node id");
    if (a == b) throw ParseError(where(path, line_no) + "self-loop on node " + std::to_string(a));
    if (declared && (a >= *declared || b >= *declared)) {
      throw ParseError(where(path, line_no) + "node id out of range for N = " + std::to_string(*declared));
    }
    edges.emplace_back(std::min(a, b), std::max(a, b));
    edge_lines.push_back(line_no);
    max_index = std::max({max_index, a, b});
  }
  // duplicates, reported at the later line
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return edges[x] < edges[y]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (edges[order[i]] == edges[order[i - 1]]) {
      const auto& e = edges[order[i]];
      throw ParseError(where(path, edge_lines[order[i]]) + "duplicate edge " + std::to_string(e.first) +
                       " " + std::to_string(e.second) + " (first at line " +
                       std::to_string(edge_lines[order[i - 1]]) + ")");
    }
  }
  return EdgeList(declared.value_or(max_index + 1), std::move(edges));
}

void save_edge_list(const EdgeList& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list to " + path);
  out << "N " << graph.n() << '\n';
  for (const auto& [a, b] : graph.edges()) out << a << ' ' << b << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ground truth " + path);
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && width == 0) {
        width = fields.size();  // header row
        continue;
      }
      throw ParseError(where(path, line_no) + "non-numeric field");
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw ParseError(where(path, line_no) + "expected " + std::to_string(width) + " columns, got " +
                       std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw ParseError(path + ": no ground-truth rows");

  GroundTruth truth;
  if (width == 1) {
    std::vector<int> labels;
    int top = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = rows[i][0];
      if (v != std::floor(v) || v < 1) {
        throw ParseError(where(path, row_lines[i]) + "labels must be integers in [1..K]");
      }
      labels.push_back(static_cast<int>(v) - 1);
      top = std::max(top, static_cast<int>(v));
    }
    truth.k = top;
    truth.labels = std::move(labels);
    return truth;
  }

  Matrix m(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      if (rows[i][c] < 0.0) throw ParseError(where(path, row_lines[i]) + "negative membership");
      sum += rows[i][c];
    }
    if (!(sum > 0.0)) throw ParseError(where(path, row_lines[i]) + "membership row sums to zero");
    if (std::abs(sum - 1.0) > 1e-6) truth.renormalized = true;
    for (std::size_t c = 0; c < width; ++c) m(static_cast<Index>(c), static_cast<Index>(i)) = rows[i][c] / sum;
  }
  if (truth.renormalized) warn(path + ": membership rows renormalized to sum to 1");
  truth.k = static_cast<int>(width);
  truth.memberships = std::move(m);
  return truth;
}

void save_membership_csv(const Matrix& m_hat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write memberships to " + path);
  out << std::setprecision(17);
  for (Index n = 0; n < m_hat.cols(); ++n) {
    for (Index k = 0; k < m_hat.rows(); ++k) out << (k ? "," : "") << m_hat(k, n);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BlockSet extract_blocks(EdgeOracle& oracle, const QueryPlan& plan) {
  BlockSet out;
  const auto& part = plan.partition();
  for (const auto& q : plan.queried_blocks()) {
    const auto& rows = part.group(q.row);
    const auto& cols = part.group(q.col);
    const auto nr = static_cast<Index>(rows.size());
    const auto nc = static_cast<Index>(cols.size());
    Matrix a = Matrix::Zero(nr, nc);
    if (q.row == q.col) {
      for (Index i = 0; i < nr; ++i)
        for (Index j = i + 1; j < nc; ++j)
          a(i, j) = a(j, i) = oracle.query(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) ? 1.0 : 0.0;
    } else {
      for (Index i = 0; i < nr; ++i)
        for (Index j = 0; j < nc; ++j)
          a(i, j) = oracle.query(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) ? 1.0 : 0.0;
    }
    out.insert({q.row, q.col, std::move(a)});
  }
  return out;
}

BlockSet extract_blocks(const EdgeList& graph, const QueryPlan& plan) {
  if (plan.num_nodes() != graph.n()) {
    throw PlanError("plan covers " + std::to_string(plan.num_nodes()) + " nodes but the graph has " +
                    std::to_string(graph.n()));
  }
  EdgeOracle oracle(graph);
  return extract_blocks(oracle, plan);
}

BlockSet inject_annotation_errors(const BlockSet& blocks, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ParameterError("error rate must lie in [0,1]");
  BlockSet out;
  for (const auto& [key, block] : blocks) {
    if (!block.is_binary()) {
      throw ParameterError("block (" + std::to_string(key.row + 1) + "," + std::to_string(key.col + 1) +
                           ") is not binary; annotation errors need 0/1 entries");
    }
    AdjacencyBlock flipped = block;
    const auto block_seed = rng::derive(rng::derive(seed, static_cast<std::uint64_t>(key.row)),
                                        static_cast<std::uint64_t>(key.col));
    kernels::parallel::flip_block(flipped.entries, block.same_group(), rate, block_seed);
    out.insert(std::move(flipped));
  }
  return out;
}

ResultFormat parse_result_format(const std::string& name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "json") return ResultFormat::json;
  throw ParameterError("unknown result format '" + name + "' (expected csv or json)");
}

namespace {

// shortest text that parses back to the same double
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_nu(const std::vector<double>& nu) {
  std::string out;
  for (std::size_t i = 0; i < nu.size(); ++i) out += (i ? ";" : "") + fmt(nu[i]);
  return out;
}

}  // namespace

std::string format_results(const std::vector<ResultRecord>& records, ResultFormat format,
                           const std::string& config_json) {
  if (format == ResultFormat::json) {
    nlohmann::json j;
    if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
    auto arr = nlohmann::json::array();
    for (const auto& r : records) {
      arr.push_back({{"seed", r.seed}, {"N", r.n}, {"K", r.k}, {"L", r.l}, {"eta", r.eta},
                     {"nu", r.nu}, {"metric", r.metric}, {"value", r.value},
                     {"runtime_s", r.runtime_s}});
    }
    j["records"] = arr;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  if (!config_json.empty()) out << "# config: " << nlohmann::json::parse(config_json).dump() << '\n';
  out << "seed,N,K,L,eta,nu,metric,value,runtime_s\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.n << ',' << r.k << ',' << r.l << ',' << fmt(r.eta) << ','
        << join_nu(r.nu) << ',' << r.metric << ',' << fmt(r.value) << ',' << fmt(r.runtime_s) << '\n';
  }
  return out.str();
}

void write_results(const std::vector<ResultRecord>& records, const std::string& path,
                   ResultFormat format, const std::string& config_json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open results file " + path);
  out << format_results(records, format, config_json);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ResultRecord> read_results(const std::string& path, ResultFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open results file " + path);
  std::vector<ResultRecord> records;
  if (format == ResultFormat::json) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      for (const auto& r : j.at("records")) {
        ResultRecord rec;
        rec.seed = r.at("seed").get<std::uint64_t>();
        rec.n = r.at("N").get<Index>();
        rec.k = r.at("K").get<int>();
        rec.l = r.at("L").get<int>();
        rec.eta = r.at("eta").get<double>();
        rec.nu = r.at("nu").get<std::vector<double>>();
        rec.metric = r.at("metric").get<std::string>();
        rec.value = r.at("value").get<double>();
        rec.runtime_s = r.at("runtime_s").get<double>();
        records.push_back(std::move(rec));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    return records;
  }
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream s(line);
    for (std::string part; std::getline(s, part, ',');) f.push_back(part);
    if (f.size() != 9) throw ParseError(where(path, line_no) + "expected 9 columns");
    ResultRecord rec;
    try {
      rec.seed = std::stoull(f[0]);
      rec.n = std::stoll(f[1]);
      rec.k = std::stoi(f[2]);
      rec.l = std::stoi(f[3]);
      rec.eta = std::stod(f[4]);
      std::istringstream nu(f[5]);
      for (std::string v; std::getline(nu, v, ';');) rec.nu.push_back(std::stod(v));
      rec.metric = f[6];
      rec.value = std::stod(f[7]);
      rec.runtime_s = std::stod(f[8]);
    } catch (const std::exception&) {
      throw ParseError(where(path, line_no) + "malformed record");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace bequec
