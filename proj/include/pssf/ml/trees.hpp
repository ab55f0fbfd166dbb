#pragma once

#include "pssf/ml/model.hpp"

#include <string>
#include <vector>

namespace pssf {

struct ForestConfig {
    int n_trees = 200;
    int max_depth = 12;
    int min_leaf = 2;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct BoostConfig {
    int n_rounds = 150;
    int max_depth = 3;
    int min_leaf = 2;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

// Bagged CART trees on weighted Gini impurity; floor(sqrt(p)) candidate
// features per split; each tree draws its bootstrap and feature samples from
// a stream derived from (seed, tree index), so tree-parallel training is
// schedule-independent.
TrainedModel train_random_forest(const MatXd& X, const std::vector<int>& y,
                                 const std::vector<std::string>& feature_names, int n_classes,
                                 const ForestConfig& cfg, const VecXd& class_weight);

// Stagewise regression trees on logistic (binary) or softmax (multiclass)
// gradients with Newton leaf values, following Friedman's first-order
// procedure.
TrainedModel train_gradient_boosting(const MatXd& X, const std::vector<int>& y,
                                     const std::vector<std::string>& feature_names, int n_classes,
                                     const BoostConfig& cfg, const VecXd& class_weight);

}  // namespace pssf
