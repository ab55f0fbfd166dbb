#include "pssf/ml/trees.hpp"

#include "pssf/core/parallel.hpp"
#include "pssf/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pssf {

namespace {

void check_inputs(const MatXd& X, const std::vector<int>& y, int n_classes) {
    if (!X.allFinite()) throw Error::runtime("training matrix contains non-finite values");
    if (static_cast<Eigen::Index>(y.size()) != X.rows())
        throw Error::runtime("label count does not match row count");
    std::set<int> seen(y.begin(), y.end());
    if (seen.size() < 2) throw Error::runtime("training labels contain a single class");
    for (int label : y)
        if (label < 0 || label >= n_classes) throw Error::runtime("label out of range");
}

// ---- classification trees (random forest) ----

struct ClassSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct ClassTreeBuilder {
    const MatXd& X;
    const std::vector<int>& y;
    const VecXd& class_weight;
    int n_classes;
    int max_depth;
    int min_leaf;
    int n_candidates;
    RandomStream& rng;
    Tree tree;
    VecXd gain_by_feature;

    ClassTreeBuilder(const MatXd& X_, const std::vector<int>& y_, const VecXd& cw, int k,
                     int depth, int leaf, int candidates, RandomStream& rng_)
        : X(X_), y(y_), class_weight(cw), n_classes(k), max_depth(depth), min_leaf(leaf),
          n_candidates(candidates), rng(rng_) {
        gain_by_feature = VecXd::Zero(X.cols());
    }

    // weighted Gini mass: sum_w * (1 - sum_c (w_c / sum_w)^2)
    static double gini_mass(const VecXd& counts) {
        const double total = counts.sum();
        if (total <= 0.0) return 0.0;
        return total - counts.squaredNorm() / total;
    }

    VecXd weighted_counts(const std::vector<int>& rows) const {
        VecXd counts = VecXd::Zero(n_classes);
        for (int r : rows) counts[y[static_cast<std::size_t>(r)]] += class_weight[y[static_cast<std::size_t>(r)]];
        return counts;
    }

    ClassSplit best_split(std::vector<int>& rows, const VecXd& parent_counts) {
        ClassSplit best;
        const double parent_mass = gini_mass(parent_counts);

        // sample candidate features without replacement
        std::vector<int> features(static_cast<std::size_t>(X.cols()));
        std::iota(features.begin(), features.end(), 0);
        for (int i = 0; i < n_candidates; ++i) {
            const std::size_t j = i + rng.uniform_int(features.size() - static_cast<std::size_t>(i));
            std::swap(features[static_cast<std::size_t>(i)], features[j]);
        }
        features.resize(static_cast<std::size_t>(n_candidates));

        std::vector<int> order;
        for (int f : features) {
            order = rows;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = X(a, f), vb = X(b, f);
                if (va != vb) return va < vb;
                return a < b;
            });
            VecXd left = VecXd::Zero(n_classes);
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const int r = order[i];
                left[y[static_cast<std::size_t>(r)]] += class_weight[y[static_cast<std::size_t>(r)]];
                const double v = X(r, f);
                const double vnext = X(order[i + 1], f);
                if (v == vnext) continue;
                const std::size_t n_left = i + 1;
                if (n_left < static_cast<std::size_t>(min_leaf) ||
                    order.size() - n_left < static_cast<std::size_t>(min_leaf))
                    continue;
                const VecXd right = parent_counts - left;
                const double gain = parent_mass - gini_mass(left) - gini_mass(right);
                if (gain > best.gain + 1e-12) {
                    best.feature = f;
                    best.threshold = v + (vnext - v) / 2.0;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(std::vector<int> rows, int depth) {
        const VecXd counts = weighted_counts(rows);
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        ClassSplit split;
        if (depth < max_depth && rows.size() >= 2 * static_cast<std::size_t>(min_leaf) &&
            gini_mass(counts) > 0.0)
            split = best_split(rows, counts);

        if (split.feature < 0) {
            tree.nodes[static_cast<std::size_t>(node_index)].leaf = counts / counts.sum();
            return node_index;
        }
        gain_by_feature[split.feature] += split.gain;

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int left = build(std::move(left_rows), depth + 1);
        const int right = build(std::move(right_rows), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }
};

// ---- regression trees (gradient boosting) ----

struct RegressionSample {
    double residual = 0.0;  // weighted gradient numerator contribution
    double hessian = 0.0;   // weighted curvature contribution
    double weight = 0.0;
};

struct RegSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct RegTreeBuilder {
    const MatXd& X;
    const std::vector<RegressionSample>& samples;
    int max_depth;
    int min_leaf;
    double leaf_scale;  // 1 for binary, (K-1)/K for multiclass
    Tree tree;
    VecXd gain_by_feature;

    RegTreeBuilder(const MatXd& X_, const std::vector<RegressionSample>& s, int depth, int leaf,
                   double scale)
        : X(X_), samples(s), max_depth(depth), min_leaf(leaf), leaf_scale(scale) {
        gain_by_feature = VecXd::Zero(X.cols());
    }

    struct Stats {
        double w = 0.0, wr = 0.0, wr2 = 0.0, wh = 0.0;

        void add(const RegressionSample& s) {
            w += s.weight;
            const double r = s.residual / s.weight;  // plain residual
            wr += s.weight * r;
            wr2 += s.weight * r * r;
            wh += s.hessian;
        }
        double sse() const { return w > 0.0 ? wr2 - wr * wr / w : 0.0; }
    };

    Stats stats_of(const std::vector<int>& rows) const {
        Stats st;
        for (int r : rows) st.add(samples[static_cast<std::size_t>(r)]);
        return st;
    }

    RegSplit best_split(const std::vector<int>& rows, const Stats& parent) const {
        RegSplit best;
        const double parent_sse = parent.sse();
        std::vector<int> order;
        for (int f = 0; f < static_cast<int>(X.cols()); ++f) {
            order = rows;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = X(a, f), vb = X(b, f);
                if (va != vb) return va < vb;
                return a < b;
            });
            Stats left;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                left.add(samples[static_cast<std::size_t>(order[i])]);
                const double v = X(order[i], f);
                const double vnext = X(order[i + 1], f);
                if (v == vnext) continue;
                const std::size_t n_left = i + 1;
                if (n_left < static_cast<std::size_t>(min_leaf) ||
                    order.size() - n_left < static_cast<std::size_t>(min_leaf))
                    continue;
                Stats right;
                right.w = parent.w - left.w;
                right.wr = parent.wr - left.wr;
                right.wr2 = parent.wr2 - left.wr2;
                const double gain = parent_sse - left.sse() - right.sse();
                if (gain > best.gain + 1e-12) {
                    best.feature = f;
                    best.threshold = v + (vnext - v) / 2.0;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(std::vector<int> rows, int depth) {
        const Stats st = stats_of(rows);
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        RegSplit split;
        if (depth < max_depth && rows.size() >= 2 * static_cast<std::size_t>(min_leaf))
            split = best_split(rows, st);

        if (split.feature < 0) {
            double num = 0.0, denom = 0.0;
            for (int r : rows) {
                num += samples[static_cast<std::size_t>(r)].residual;
                denom += samples[static_cast<std::size_t>(r)].hessian;
            }
            VecXd leaf(1);
            leaf[0] = leaf_scale * num / std::max(denom, 1e-12);
            tree.nodes[static_cast<std::size_t>(node_index)].leaf = leaf;
            return node_index;
        }
        gain_by_feature[split.feature] += split.gain;

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int left = build(std::move(left_rows), depth + 1);
        const int right = build(std::move(right_rows), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }
};

}  // namespace

TrainedModel train_random_forest(const MatXd& X, const std::vector<int>& y,
                                 const std::vector<std::string>& feature_names, int n_classes,
                                 const ForestConfig& cfg, const VecXd& class_weight) {
    check_inputs(X, y, n_classes);
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const int candidates =
        std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(X.cols())))));

    std::vector<Tree> trees(static_cast<std::size_t>(cfg.n_trees));
    std::vector<VecXd> gains(static_cast<std::size_t>(cfg.n_trees));
    parallel_for(static_cast<std::size_t>(cfg.n_trees), cfg.jobs, [&](std::size_t t) {
        RandomStream rng(derive_seed(cfg.seed, {"tree", std::to_string(t)}));
        std::vector<int> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = static_cast<int>(rng.uniform_int(n));
        std::sort(bootstrap.begin(), bootstrap.end());
        ClassTreeBuilder builder(X, y, class_weight, n_classes, cfg.max_depth, cfg.min_leaf,
                                 candidates, rng);
        builder.build(std::move(bootstrap), 0);
        trees[t] = std::move(builder.tree);
        gains[t] = std::move(builder.gain_by_feature);
    });

    TrainedModel model;
    model.kind = "random_forest";
    model.task = n_classes == 2 ? "binary_0v2" : "three_class";
    model.features = feature_names;
    model.n_classes = n_classes;
    model.seed = cfg.seed;
    model.trees = std::move(trees);
    model.split_gain = VecXd::Zero(X.cols());
    for (const VecXd& g : gains) model.split_gain += g;
    model.config_echo["n_trees"] = cfg.n_trees;
    model.config_echo["max_depth"] = cfg.max_depth;
    model.config_echo["min_leaf"] = cfg.min_leaf;
    return model;
}

TrainedModel train_gradient_boosting(const MatXd& X, const std::vector<int>& y,
                                     const std::vector<std::string>& feature_names, int n_classes,
                                     const BoostConfig& cfg, const VecXd& class_weight) {
    check_inputs(X, y, n_classes);
    const Eigen::Index n = X.rows();
    const int k = n_classes == 2 ? 1 : n_classes;
    const double leaf_scale = k == 1 ? 1.0 : (static_cast<double>(k) - 1.0) / static_cast<double>(k);

    VecXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = class_weight[y[static_cast<std::size_t>(i)]];

    // weighted priors as the initial raw scores
    VecXd f0(k);
    if (k == 1) {
        double wp = 0.0, wn = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            (y[static_cast<std::size_t>(i)] == 1 ? wp : wn) += w[i];
        f0[0] = std::log(wp / wn);
    } else {
        for (int c = 0; c < k; ++c) {
            double wc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (y[static_cast<std::size_t>(i)] == c) wc += w[i];
            f0[c] = std::log(wc / w.sum());
        }
    }

    MatXd score(n, k);
    for (int c = 0; c < k; ++c) score.col(c).setConstant(f0[c]);

    TrainedModel model;
    model.kind = "gradient_boosting";
    model.task = n_classes == 2 ? "binary_0v2" : "three_class";
    model.features = feature_names;
    model.n_classes = n_classes;
    model.seed = cfg.seed;
    model.f0 = f0;
    model.learning_rate = cfg.learning_rate;
    model.split_gain = VecXd::Zero(X.cols());

    std::vector<int> all_rows(static_cast<std::size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (int round = 0; round < cfg.n_rounds; ++round) {
        // current probabilities
        MatXd proba(n, k);
        if (k == 1) {
            for (Eigen::Index i = 0; i < n; ++i) proba(i, 0) = 1.0 / (1.0 + std::exp(-score(i, 0)));
        } else {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double m = score.row(i).maxCoeff();
                VecXd e = (score.row(i).transpose().array() - m).exp();
                proba.row(i) = (e / e.sum()).transpose();
            }
        }

        std::vector<Tree> per_class;
        for (int c = 0; c < k; ++c) {
            std::vector<RegressionSample> samples(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                const double target = k == 1 ? (y[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0)
                                             : (y[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
                const double r = target - proba(i, c);
                samples[static_cast<std::size_t>(i)].residual = w[i] * r;
                samples[static_cast<std::size_t>(i)].hessian = w[i] * std::abs(r) * (1.0 - std::abs(r));
                samples[static_cast<std::size_t>(i)].weight = w[i];
            }
            RegTreeBuilder builder(X, samples, cfg.max_depth, cfg.min_leaf, leaf_scale);
            builder.build(all_rows, 0);
            model.split_gain += builder.gain_by_feature;
            for (Eigen::Index i = 0; i < n; ++i)
                score(i, c) += cfg.learning_rate * builder.tree.descend(X.row(i).transpose()).leaf[0];
            per_class.push_back(std::move(builder.tree));
        }
        model.rounds.push_back(std::move(per_class));
    }

    model.config_echo["n_rounds"] = cfg.n_rounds;
    model.config_echo["max_depth"] = cfg.max_depth;
    model.config_echo["min_leaf"] = cfg.min_leaf;
    model.config_echo["learning_rate"] = cfg.learning_rate;
    return model;
}

}  // namespace pssf
