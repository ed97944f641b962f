#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lhiem::tree {

struct ColumnSpec {
    std::string name;
    bool categorical = false;
    int levels = 0; // categorical only
};

// Row-major covariate matrix with outcome and optional row weights.
// Categorical cells hold the level index as a double.
struct Dataset {
    std::vector<ColumnSpec> columns;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w; // empty means unit weights

    std::size_t nrows() const { return y.size(); }
    std::size_t ncols() const { return columns.size(); }
    double value(std::size_t r, std::size_t c) const { return x[r * columns.size() + c]; }
    double weight(std::size_t r) const { return w.empty() ? 1.0 : w[r]; }
};

// Numeric: value < threshold goes left. Categorical: levels whose bit is set
// in `subset` go left.
struct Split {
    int column = -1;
    double threshold = 0.0;
    std::uint32_t subset = 0;
};

struct Node {
    Split split;           // column == -1 for a leaf
    int left = -1;
    int right = -1;
    double mean = 0.0;     // node mean of the outcome
    double sse = 0.0;      // resubstitution error if this node were a leaf
    double weight = 0.0;
    double train_share = 0.0;
    int leaf_id = -1;      // dense leaf numbering, pre-order; -1 on internals
};

class PartitionTree {
  public:
    std::vector<Node> nodes; // nodes[0] is the root
    std::vector<ColumnSpec> columns;

    bool empty() const { return nodes.empty(); }
    int n_leaves() const;
    int n_splits() const { return n_leaves() - 1; }

    // Index of the leaf node a covariate row reaches; row must carry one
    // value per column in `columns`.
    std::size_t route(const double* row) const;

    // Re-assigns dense, pre-order leaf ids. Called after any pruning.
    void assign_leaf_ids();

    double root_sse() const { return nodes.empty() ? 0.0 : nodes[0].sse; }
    double leaf_sse_total() const;
};

// One row of the rpart-style complexity table. cp values are on the scale
// of error improvement relative to the root node error.
struct CvPoint {
    double cp = 0.0;
    int n_splits = 0;
    double rel_error = 0.0; // training R(T)/R(root)
    double cv_error = 0.0;
    double cv_sd = 0.0;
};
using CvCurve = std::vector<CvPoint>;

struct GrowControls {
    int min_split = 20;      // smallest node eligible for splitting (rows)
    int min_bucket = 7;      // smallest allowed child (rows)
    double cp_grow = 1e-4;   // normalized improvement required while growing
    int max_depth = 30;
    int cv_folds = 10;
    std::uint64_t seed = 0;
};

struct FitResult {
    PartitionTree full_tree; // grown, then pruned at cp_grow
    CvCurve curve;           // rows ordered by strictly decreasing cp
};

// Greedy variance-reduction growth, weakest-link pruning sequence, k-fold
// cross-validation errors per subtree. Throws ModelError("TooFewRows") when
// the sample cannot support the requested folds.
FitResult grow_tree(const Dataset& data, const GrowControls& controls);

// Smallest subtree optimal at complexity parameter cp (weakest links with
// normalized g <= cp are collapsed, repeatedly).
PartitionTree prune_at_cp(const PartitionTree& t, double cp);

// One-standard-error rule: the smallest subtree whose CV error is within
// one sd above the minimum; override_cp instead returns the subtree at that
// complexity parameter.
PartitionTree prune_one_se(const PartitionTree& t, const CvCurve& curve,
                           std::optional<double> override_cp = std::nullopt);

// Critical complexity values of the weakest-link sequence, ascending,
// normalized by the root node error. Exposed for the pruning oracle tests.
std::vector<double> pruning_sequence_alphas(const PartitionTree& t);

} // namespace lhiem::tree
