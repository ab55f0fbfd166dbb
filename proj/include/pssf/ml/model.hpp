#pragma once

#include "pssf/core/json_io.hpp"
#include "pssf/core/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pssf {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    VecXd leaf;  // class distribution (forest) or per-leaf value (boosting)
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root

    const TreeNode& descend(const VecXd& x) const;
};

struct TrainedModel {
    std::string kind;  // logreg_l2 | random_forest | gradient_boosting
    std::string task;  // binary_0v2 | three_class
    std::vector<std::string> features;
    int n_classes = 2;
    std::uint64_t seed = 0;
    Json config_echo = Json::object();

    // logreg: standardizer + coefficients on the standardized scale
    VecXd mean;
    VecXd sd;
    MatXd coef;  // features x classes
    VecXd intercept;

    // random forest: trees with class-distribution leaves
    std::vector<Tree> trees;

    // gradient boosting: per round, one regression tree per class
    std::vector<std::vector<Tree>> rounds;
    VecXd f0;
    double learning_rate = 0.1;

    // per-feature importance scores accumulated during training (trees);
    // logreg derives importance from |coef| on demand
    VecXd split_gain;

    // rows x n_classes probabilities; X columns must match `features`
    MatXd predict_proba(const MatXd& X) const;

    // per-feature importance aligned with `features`: |standardized coef|
    // summed over classes for logreg, normalized split gain for trees
    VecXd importance() const;

    void validate() const;
};

// Ranked (feature, score) list, descending score, ties by column order.
std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace pssf
