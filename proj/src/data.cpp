#include "flexlink/data.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace flexlink {

namespace {

std::runtime_error parse_error(const std::string& path, int line,
                               const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  return std::runtime_error(os.str());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw parse_error(path, line, "not a number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw parse_error(path, line, "not an integer: '" + s + "'");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// AdjacencyGraph

int AdjacencyGraph::intern(const std::string& label) {
  for (int i = 0; i < size(); ++i)
    if (labels_[i] == label) return i;
  labels_.push_back(label);
  adj_.emplace_back();
  return size() - 1;
}

int AdjacencyGraph::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

AdjacencyGraph AdjacencyGraph::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges) {
  AdjacencyGraph g;
  for (const auto& [a, b] : edges) {
    if (a == b)
      throw std::runtime_error("adjacency: self loop on region '" + a + "'");
    const int i = g.intern(a);
    const int j = g.intern(b);
    auto& ni = g.adj_[i];
    if (std::find(ni.begin(), ni.end(), j) != ni.end()) continue;  // duplicate
    ni.push_back(j);
    g.adj_[j].push_back(i);
  }
  return g;
}

AdjacencyGraph AdjacencyGraph::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open adjacency file: " + path);
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string a, b, extra;
    if (!(is >> a)) continue;  // blank line
    if (!(is >> b)) throw parse_error(path, lineno, "expected two region labels");
    if (is >> extra) throw parse_error(path, lineno, "trailing tokens");
    edges.emplace_back(a, b);
  }
  return from_edges(edges);
}

int AdjacencyGraph::component_count() const {
  std::vector<int> mark(size(), 0);
  int components = 0;
  for (int s = 0; s < size(); ++s) {
    if (mark[s]) continue;
    ++components;
    std::vector<int> stack{s};
    mark[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj_[v])
        if (!mark[u]) {
          mark[u] = 1;
          stack.push_back(u);
        }
    }
  }
  return components;
}

// ---------------------------------------------------------------------------
// Dataset

int Dataset::covariate_index(const std::string& name) const {
  for (int j = 0; j < k(); ++j)
    if (covariate_names[j] == name) return j;
  return -1;
}

void Dataset::validate() const {
  if (n() == 0) throw std::runtime_error("dataset is empty");
  if (X.rows() != n() || trials.size() != n())
    throw std::runtime_error("dataset: inconsistent row counts");
  if (static_cast<int>(covariate_names.size()) != k())
    throw std::runtime_error("dataset: covariate name count mismatch");
  for (int i = 0; i < n(); ++i) {
    if (trials[i] <= 0) throw std::runtime_error("dataset: N_i must be positive");
    if (y[i] < 0 || y[i] > trials[i])
      throw std::runtime_error("dataset: y_i outside [0, N_i]");
  }
  if (!region.empty() && static_cast<int>(region.size()) != n())
    throw std::runtime_error("dataset: region count mismatch");
}

Dataset read_dataset_csv(const std::string& path, const AdjacencyGraph* graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_csv_line(line);

  int y_col = -1, n_col = -1, region_col = -1;
  std::vector<int> cov_cols;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (header[j] == "y")
      y_col = j;
    else if (header[j] == "n")
      n_col = j;
    else if (header[j] == "region")
      region_col = j;
    else if (!header[j].empty())
      cov_cols.push_back(j);
  }
  if (y_col < 0 || n_col < 0)
    throw std::runtime_error(path + ": header must contain 'y' and 'n' columns");

  std::vector<std::vector<double>> xs;
  std::vector<int> ys, ns;
  std::vector<std::string> region_raw;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw parse_error(path, lineno, "expected " + std::to_string(header.size()) +
                                          " fields, got " + std::to_string(fields.size()));
    const long yv = parse_long(fields[y_col], path, lineno);
    const long nv = parse_long(fields[n_col], path, lineno);
    if (nv <= 0) throw parse_error(path, lineno, "n must be positive");
    if (yv < 0 || yv > nv)
      throw parse_error(path, lineno, "y=" + std::to_string(yv) + " outside [0, n=" +
                                          std::to_string(nv) + "]");
    std::vector<double> row;
    row.reserve(cov_cols.size());
    for (int j : cov_cols) row.push_back(parse_double(fields[j], path, lineno));
    if (region_col >= 0) {
      if (fields[region_col].empty())
        throw parse_error(path, lineno, "empty region label");
      region_raw.push_back(fields[region_col]);
    }
    xs.push_back(std::move(row));
    ys.push_back(static_cast<int>(yv));
    ns.push_back(static_cast<int>(nv));
  }
  if (ys.empty()) throw std::runtime_error(path + ": no data rows");

  Dataset d;
  const int n = static_cast<int>(ys.size());
  const int k = static_cast<int>(cov_cols.size()) + 1;
  d.X.resize(n, k);
  d.y.resize(n);
  d.trials.resize(n);
  d.covariate_names.push_back("intercept");
  for (int j : cov_cols) d.covariate_names.push_back(header[j]);
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = 1.0;
    for (int j = 0; j + 1 < k; ++j) d.X(i, j + 1) = xs[i][j];
    d.y[i] = ys[i];
    d.trials[i] = ns[i];
  }

  if (region_col >= 0) {
    d.region.resize(n);
    if (graph) {
      d.region_labels = graph->labels();
      for (int i = 0; i < n; ++i) {
        const int idx = graph->index_of(region_raw[i]);
        if (idx < 0)
          throw std::runtime_error(path + ": region '" + region_raw[i] +
                                   "' not present in adjacency graph");
        d.region[i] = idx;
      }
    } else {
      std::unordered_map<std::string, int> seen;
      for (int i = 0; i < n; ++i) {
        auto [it, fresh] = seen.emplace(region_raw[i],
                                        static_cast<int>(d.region_labels.size()));
        if (fresh) d.region_labels.push_back(region_raw[i]);
        d.region[i] = it->second;
      }
    }
  }

  d.validate();
  return d;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "y,n";
  for (int j = 1; j < data.k(); ++j) out << "," << data.covariate_names[j];
  if (data.has_regions()) out << ",region";
  out << "\n";
  out.precision(17);
  for (int i = 0; i < data.n(); ++i) {
    out << data.y[i] << "," << data.trials[i];
    for (int j = 1; j < data.k(); ++j) out << "," << data.X(i, j);
    if (data.has_regions()) out << "," << data.region_labels[data.region[i]];
    out << "\n";
  }
}

}  // namespace flexlink
