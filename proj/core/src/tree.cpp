#include "lhiem/tree.hpp"

#include "lhiem/errors.hpp"
#include "lhiem/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lhiem::tree {

int PartitionTree::n_leaves() const {
    int n = 0;
    for (const auto& node : nodes) {
        if (node.split.column < 0) ++n;
    }
    return n;
}

std::size_t PartitionTree::route(const double* row) const {
    std::size_t i = 0;
    while (nodes[i].split.column >= 0) {
        const Split& s = nodes[i].split;
        double v = row[s.column];
        if (std::isnan(v)) throw DataError("tree routing hit a missing covariate value");
        bool go_left;
        if (columns[s.column].categorical) {
            go_left = (s.subset >> static_cast<std::uint32_t>(v)) & 1u;
        } else {
            go_left = v < s.threshold;
        }
        i = static_cast<std::size_t>(go_left ? nodes[i].left : nodes[i].right);
    }
    return i;
}

void PartitionTree::assign_leaf_ids() {
    int next = 0;
    for (auto& node : nodes) node.leaf_id = -1;
    // nodes are stored in pre-order by construction
    for (auto& node : nodes) {
        if (node.split.column < 0) node.leaf_id = next++;
    }
}

double PartitionTree::leaf_sse_total() const {
    double total = 0.0;
    for (const auto& node : nodes) {
        if (node.split.column < 0) total += node.sse;
    }
    return total;
}

namespace {

struct NodeStats {
    double w = 0.0;
    double wy = 0.0;
    double wyy = 0.0;

    void add(double weight, double y) {
        w += weight;
        wy += weight * y;
        wyy += weight * y * y;
    }
    double sse() const { return w > 0.0 ? std::max(0.0, wyy - wy * wy / w) : 0.0; }
    double mean() const { return w > 0.0 ? wy / w : 0.0; }
};

struct BestSplit {
    Split split;
    double improvement = 0.0;
    bool found = false;
};

// Exhaustive best split for one node. Ties break toward the lower column
// index, then the smaller threshold/subset, so growth is deterministic.
BestSplit find_best_split(const Dataset& data, const std::vector<std::size_t>& rows,
                          const NodeStats& node, int min_bucket) {
    BestSplit best;
    const double parent_sse = node.sse();
    if (parent_sse <= 0.0) return best;

    for (std::size_t c = 0; c < data.ncols(); ++c) {
        const ColumnSpec& col = data.columns[c];
        if (col.categorical) {
            constexpr int kMaxLevels = 12;
            if (col.levels < 2 || col.levels > kMaxLevels) continue;
            NodeStats per_level[kMaxLevels];
            int level_rows[kMaxLevels] = {0};
            for (std::size_t r : rows) {
                int lvl = static_cast<int>(data.value(r, c));
                per_level[lvl].add(data.weight(r), data.y[r]);
                ++level_rows[lvl];
            }
            // Fix the last level to the right side; enumerate the rest.
            std::uint32_t limit = 1u << (col.levels - 1);
            for (std::uint32_t subset = 1; subset < limit; ++subset) {
                NodeStats left;
                int left_rows = 0;
                for (int lvl = 0; lvl < col.levels - 1; ++lvl) {
                    if ((subset >> lvl) & 1u) {
                        left.w += per_level[lvl].w;
                        left.wy += per_level[lvl].wy;
                        left.wyy += per_level[lvl].wyy;
                        left_rows += level_rows[lvl];
                    }
                }
                int right_rows = static_cast<int>(rows.size()) - left_rows;
                if (left_rows < min_bucket || right_rows < min_bucket) continue;
                NodeStats right;
                right.w = node.w - left.w;
                right.wy = node.wy - left.wy;
                right.wyy = node.wyy - left.wyy;
                double gain = parent_sse - left.sse() - right.sse();
                if (gain > best.improvement + 1e-12 ||
                    (gain > best.improvement - 1e-12 && best.found &&
                     (static_cast<int>(c) < best.split.column ||
                      (static_cast<int>(c) == best.split.column && subset < best.split.subset)))) {
                    best.found = true;
                    best.improvement = gain;
                    best.split = {static_cast<int>(c), 0.0, subset};
                }
            }
        } else {
            std::vector<std::size_t> order(rows);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return data.value(a, c) < data.value(b, c);
            });
            NodeStats left;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                std::size_t r = order[i];
                left.add(data.weight(r), data.y[r]);
                double v = data.value(r, c);
                double v_next = data.value(order[i + 1], c);
                if (v == v_next) continue;
                int left_rows = static_cast<int>(i) + 1;
                int right_rows = static_cast<int>(order.size()) - left_rows;
                if (left_rows < min_bucket || right_rows < min_bucket) continue;
                NodeStats right;
                right.w = node.w - left.w;
                right.wy = node.wy - left.wy;
                right.wyy = node.wyy - left.wyy;
                double gain = parent_sse - left.sse() - right.sse();
                double threshold = (v + v_next) / 2.0;
                if (gain > best.improvement + 1e-12 ||
                    (gain > best.improvement - 1e-12 && best.found &&
                     (static_cast<int>(c) < best.split.column ||
                      (static_cast<int>(c) == best.split.column &&
                       threshold < best.split.threshold)))) {
                    best.found = true;
                    best.improvement = gain;
                    best.split = {static_cast<int>(c), threshold, 0};
                }
            }
        }
    }
    return best;
}

struct Grower {
    const Dataset& data;
    const GrowControls& controls;
    PartitionTree tree;
    double root_sse = 0.0;
    double root_weight = 0.0;

    // Pre-order construction: the node is appended before its children.
    int grow(std::vector<std::size_t>& rows, int depth) {
        NodeStats stats;
        for (std::size_t r : rows) stats.add(data.weight(r), data.y[r]);

        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        {
            Node& node = tree.nodes[idx];
            node.mean = stats.mean();
            node.sse = stats.sse();
            node.weight = stats.w;
            node.train_share = root_weight > 0.0 ? stats.w / root_weight : 1.0;
        }

        if (static_cast<int>(rows.size()) < controls.min_split || depth >= controls.max_depth ||
            tree.nodes[idx].sse <= 0.0) {
            return idx;
        }
        BestSplit best = find_best_split(data, rows, stats, controls.min_bucket);
        if (!best.found || best.improvement < controls.cp_grow * root_sse) return idx;

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        const ColumnSpec& col = data.columns[best.split.column];
        for (std::size_t r : rows) {
            double v = data.value(r, static_cast<std::size_t>(best.split.column));
            bool go_left = col.categorical
                               ? ((best.split.subset >> static_cast<std::uint32_t>(v)) & 1u)
                               : (v < best.split.threshold);
            (go_left ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[idx].split = best.split;
        int l = grow(left_rows, depth + 1);
        tree.nodes[idx].left = l;
        int r = grow(right_rows, depth + 1);
        tree.nodes[idx].right = r;
        return idx;
    }
};

PartitionTree grow_full(const Dataset& data, const GrowControls& controls) {
    Grower g{data, controls, {}, 0.0, 0.0};
    g.tree.columns = data.columns;
    NodeStats root;
    for (std::size_t r = 0; r < data.nrows(); ++r) root.add(data.weight(r), data.y[r]);
    g.root_sse = root.sse();
    g.root_weight = root.w;
    std::vector<std::size_t> rows(data.nrows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    g.grow(rows, 0);
    g.tree.assign_leaf_ids();
    return std::move(g.tree);
}

// Weakest-link bookkeeping over a tree: per-node subtree error and leaf
// count, with collapsed nodes tracked in `is_leaf`.
struct PruneState {
    const PartitionTree& t;
    std::vector<char> is_leaf;
    std::vector<double> subtree_sse;
    std::vector<int> subtree_leaves;

    explicit PruneState(const PartitionTree& tree) : t(tree) {
        is_leaf.assign(t.nodes.size(), 0);
        subtree_sse.assign(t.nodes.size(), 0.0);
        subtree_leaves.assign(t.nodes.size(), 0);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (t.nodes[i].split.column < 0) is_leaf[i] = 1;
        }
        refresh();
    }

    void refresh() {
        // children are stored after parents, so a reverse sweep suffices
        for (std::size_t k = t.nodes.size(); k-- > 0;) {
            if (is_leaf[k]) {
                subtree_sse[k] = t.nodes[k].sse;
                subtree_leaves[k] = 1;
            } else {
                subtree_sse[k] = subtree_sse[t.nodes[k].left] + subtree_sse[t.nodes[k].right];
                subtree_leaves[k] = subtree_leaves[t.nodes[k].left] + subtree_leaves[t.nodes[k].right];
            }
        }
    }

    // Normalized weakest-link value of internal node i.
    double g(std::size_t i, double root_sse) const {
        double saved = t.nodes[i].sse - subtree_sse[i];
        return saved / (root_sse * (subtree_leaves[i] - 1));
    }

    // Collapses every internal node whose g equals the current minimum and
    // returns that minimum; infinity when only the root leaf remains.
    double collapse_weakest(double root_sse) {
        double min_g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (!is_leaf[i] && t.nodes[i].split.column >= 0) {
                min_g = std::min(min_g, g(i, root_sse));
            }
        }
        if (!std::isfinite(min_g)) return min_g;
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (!is_leaf[i] && t.nodes[i].split.column >= 0 &&
                g(i, root_sse) <= min_g * (1.0 + 1e-12)) {
                collapse(i);
            }
        }
        refresh();
        return min_g;
    }

    void collapse(std::size_t i) {
        is_leaf[i] = 1;
        // descendants become unreachable; marking them keeps g() scans honest
        mark_subtree(i);
    }

    void mark_subtree(std::size_t i) {
        if (t.nodes[i].split.column < 0) return;
        std::size_t l = static_cast<std::size_t>(t.nodes[i].left);
        std::size_t r = static_cast<std::size_t>(t.nodes[i].right);
        is_leaf[l] = 1;
        is_leaf[r] = 1;
        mark_subtree(l);
        mark_subtree(r);
    }

    int live_leaves() const { return subtree_leaves[0]; }

    // Extracts the current subtree as a compacted PartitionTree.
    PartitionTree extract() const {
        PartitionTree out;
        out.columns = t.columns;
        extract_node(0, out);
        out.assign_leaf_ids();
        return out;
    }

    int extract_node(std::size_t i, PartitionTree& out) const {
        int idx = static_cast<int>(out.nodes.size());
        out.nodes.push_back(t.nodes[i]);
        out.nodes[idx].leaf_id = -1;
        if (is_leaf[i]) {
            out.nodes[idx].split = Split{};
            out.nodes[idx].left = out.nodes[idx].right = -1;
            return idx;
        }
        int l = extract_node(static_cast<std::size_t>(t.nodes[i].left), out);
        out.nodes[idx].left = l;
        int r = extract_node(static_cast<std::size_t>(t.nodes[i].right), out);
        out.nodes[idx].right = r;
        return idx;
    }
};

} // namespace

std::vector<double> pruning_sequence_alphas(const PartitionTree& t) {
    std::vector<double> alphas;
    if (t.empty() || t.n_splits() == 0) return alphas;
    double root_sse = t.root_sse();
    if (root_sse <= 0.0) return alphas;
    PruneState st(t);
    while (true) {
        double a = st.collapse_weakest(root_sse);
        if (!std::isfinite(a)) break;
        if (!alphas.empty() && a <= alphas.back() * (1.0 + 1e-12)) {
            continue; // same critical value, same table row
        }
        alphas.push_back(a);
    }
    return alphas;
}

PartitionTree prune_at_cp(const PartitionTree& t, double cp) {
    if (t.empty() || t.n_splits() == 0) return t;
    double root_sse = t.root_sse();
    if (root_sse <= 0.0) return t;
    PruneState st(t);
    while (true) {
        // peek at the next critical value without committing
        double min_g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            if (!st.is_leaf[i] && t.nodes[i].split.column >= 0) {
                min_g = std::min(min_g, st.g(i, root_sse));
            }
        }
        if (!std::isfinite(min_g) || min_g > cp * (1.0 + 1e-12)) break;
        st.collapse_weakest(root_sse);
    }
    return st.extract();
}

namespace {

double heldout_sse(const PartitionTree& t, const Dataset& data,
                   const std::vector<std::size_t>& rows, std::vector<double>& per_row) {
    double total = 0.0;
    per_row.clear();
    per_row.reserve(rows.size());
    const std::size_t p = data.ncols();
    for (std::size_t r : rows) {
        std::size_t leaf = t.route(&data.x[r * p]);
        double e = data.y[r] - t.nodes[leaf].mean;
        double err = data.weight(r) * e * e;
        per_row.push_back(err);
        total += err;
    }
    return total;
}

} // namespace

FitResult grow_tree(const Dataset& data, const GrowControls& controls) {
    if (data.nrows() < static_cast<std::size_t>(std::max(controls.cv_folds, 2))) {
        throw ModelError("TooFewRows: " + std::to_string(data.nrows()) +
                         " training rows cannot support " + std::to_string(controls.cv_folds) +
                         "-fold cross-validation");
    }

    FitResult result;
    PartitionTree grown = grow_full(data, controls);
    result.full_tree = prune_at_cp(grown, controls.cp_grow);
    const double root_sse = result.full_tree.root_sse();

    // Complexity table rows: root first, then one row per sequence subtree,
    // ending at the tree grown at cp_grow.
    std::vector<double> alphas = pruning_sequence_alphas(result.full_tree);
    std::vector<double> row_cps;         // strictly decreasing
    std::vector<double> eval_alphas;     // where CV evaluates each row
    if (alphas.empty()) {
        row_cps.push_back(controls.cp_grow);
        eval_alphas.push_back(controls.cp_grow);
    } else {
        for (std::size_t k = alphas.size(); k-- > 0;) {
            row_cps.push_back(alphas[k]);
            // geometric mean of the optimality interval, as in rpart
            eval_alphas.push_back(k + 1 < alphas.size() ? std::sqrt(alphas[k] * alphas[k + 1])
                                                        : alphas[k]);
        }
        row_cps.push_back(controls.cp_grow);
        eval_alphas.push_back(std::sqrt(controls.cp_grow * alphas.front()));
    }

    // k-fold CV with hash-assigned folds keyed to the seed.
    int folds = controls.cv_folds;
    std::vector<int> fold_of(data.nrows());
    for (std::size_t i = 0; i < data.nrows(); ++i) {
        fold_of[i] = static_cast<int>(rng::mix64(rng::derive_key({controls.seed, 0xF01Du}) ^ i) %
                                      static_cast<std::uint64_t>(folds));
    }

    std::vector<std::vector<double>> row_errors(row_cps.size());
    for (int f = 0; f < folds; ++f) {
        Dataset train;
        train.columns = data.columns;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < data.nrows(); ++i) {
            if (fold_of[i] == f) {
                held.push_back(i);
            } else {
                for (std::size_t c = 0; c < data.ncols(); ++c) {
                    train.x.push_back(data.value(i, c));
                }
                train.y.push_back(data.y[i]);
                if (!data.w.empty()) train.w.push_back(data.w[i]);
            }
        }
        if (held.empty() || train.nrows() < 2) continue;
        PartitionTree fold_tree = grow_full(train, controls);
        std::vector<double> per_row;
        for (std::size_t k = 0; k < row_cps.size(); ++k) {
            PartitionTree pruned = prune_at_cp(fold_tree, eval_alphas[k]);
            heldout_sse(pruned, data, held, per_row);
            auto& bucket = row_errors[k];
            bucket.insert(bucket.end(), per_row.begin(), per_row.end());
        }
    }

    for (std::size_t k = 0; k < row_cps.size(); ++k) {
        CvPoint pt;
        pt.cp = row_cps[k];
        PartitionTree sub = prune_at_cp(result.full_tree, row_cps[k]);
        pt.n_splits = sub.n_splits();
        pt.rel_error = root_sse > 0.0 ? sub.leaf_sse_total() / root_sse : 0.0;
        const auto& errs = row_errors[k];
        if (!errs.empty() && root_sse > 0.0) {
            double sum = 0.0;
            for (double e : errs) sum += e;
            double mean = sum / static_cast<double>(errs.size());
            double var_sum = 0.0;
            for (double e : errs) var_sum += (e - mean) * (e - mean);
            pt.cv_error = sum / root_sse;
            pt.cv_sd = std::sqrt(var_sum) / root_sse;
        } else {
            pt.cv_error = pt.rel_error;
            pt.cv_sd = 0.0;
        }
        result.curve.push_back(pt);
    }
    return result;
}

PartitionTree prune_one_se(const PartitionTree& t, const CvCurve& curve,
                           std::optional<double> override_cp) {
    if (override_cp) return prune_at_cp(t, *override_cp);
    if (curve.empty()) throw UsageError("prune_one_se: empty complexity curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].cv_error < curve[best].cv_error) best = i;
    }
    double limit = curve[best].cv_error + curve[best].cv_sd;
    // rows run smallest tree to largest, so the first admissible row wins
    for (const auto& pt : curve) {
        if (pt.cv_error <= limit) return prune_at_cp(t, pt.cp);
    }
    return prune_at_cp(t, curve[best].cp);
}

} // namespace lhiem::tree
