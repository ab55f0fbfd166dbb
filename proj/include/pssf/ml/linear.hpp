#pragma once

#include "pssf/ml/model.hpp"

#include <string>
#include <vector>

namespace pssf {

// Weighted multinomial cross-entropy with optional L2 penalty on W (never on
// the bias). X must already be standardized. Returns the loss; fills the
// gradients when the pointers are non-null.
double softmax_loss(const MatXd& X, const std::vector<int>& y, const VecXd& sample_weight,
                    const MatXd& W, const VecXd& b, double lambda2, MatXd* grad_W,
                    VecXd* grad_b);

struct LogregConfig {
    double lambda2 = 0.1;
    double tolerance = 1e-8;  // relative objective change
    int max_iterations = 5000;
};

// Full-batch gradient descent with backtracking line search; binary labels
// train a 2-class softmax. Standardization is fit here and stored on the
// model.
TrainedModel train_logreg_l2(const MatXd& X, const std::vector<int>& y,
                             const std::vector<std::string>& feature_names, int n_classes,
                             const LogregConfig& cfg, const VecXd& class_weight);

struct L1Config {
    double lambda1 = 0.01;
    double tolerance = 1e-7;  // relative objective change
    int max_iterations = 5000;
};

// Proximal-gradient (ISTA with backtracking) minimization of L1-penalized
// multinomial logistic loss on standardized X; returns the features with any
// nonzero coefficient, in column order.
std::vector<std::string> l1_select(const MatXd& X, const std::vector<int>& y,
                                   const std::vector<std::string>& feature_names, int n_classes,
                                   const L1Config& cfg, const VecXd& class_weight);

}  // namespace pssf
