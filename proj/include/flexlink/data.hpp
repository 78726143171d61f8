#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace flexlink {

// Region proximity structure: nodes keyed by label, 0/1 symmetric adjacency
// built from an undirected edge list. Self loops are rejected, duplicate
// edges ignored.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;

  static AdjacencyGraph from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges);
  static AdjacencyGraph from_file(const std::string& path);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  // -1 when the label is unknown.
  int index_of(const std::string& label) const;
  const std::vector<int>& neighbors(int k) const { return adj_[k]; }
  int degree(int k) const { return static_cast<int>(adj_[k].size()); }
  int component_count() const;
  bool connected() const { return component_count() <= 1; }

 private:
  int intern(const std::string& label);

  std::vector<std::string> labels_;
  std::vector<std::vector<int>> adj_;
};

// Binomial observations with design matrix. The first design column is the
// intercept, added by the reader. `region` is empty when the data carry no
// region column; otherwise it holds one index per row into the graph the
// dataset was read against (or a label-interned index when read standalone).
struct Dataset {
  Eigen::MatrixXd X;                        // n x k, column 0 = intercept
  Eigen::VectorXi y;                        // successes
  Eigen::VectorXi trials;                   // N_i
  std::vector<std::string> covariate_names; // size k, [0] = "intercept"
  std::vector<int> region;                  // size n or empty
  std::vector<std::string> region_labels;   // label per region index

  int n() const { return static_cast<int>(y.size()); }
  int k() const { return static_cast<int>(X.cols()); }
  bool has_regions() const { return !region.empty(); }
  int covariate_index(const std::string& name) const;  // -1 if absent
  void validate() const;
};

// CSV reader. Header row required; columns `y` and `n` mandatory, optional
// `region`, every other column is a covariate. UTF-8, '.' decimal. When a
// graph is supplied, region labels are validated against it and region
// indices refer to graph nodes.
Dataset read_dataset_csv(const std::string& path,
                         const AdjacencyGraph* graph = nullptr);

void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace flexlink
