#pragma once

#include "pssf/core/types.hpp"

#include <string>
#include <vector>

namespace pssf {

// Mann-Whitney AUC with half-credit for tied scores; throws when y has a
// single class.
double auc_binary(const VecXd& scores, const std::vector<int>& y);

// Unweighted mean of one-vs-rest AUCs over classes present with both
// positives and negatives; throws when no class qualifies.
double auc_macro_ovr(const MatXd& proba, const std::vector<int>& y);

// Argmax with ties resolved toward the lower class index.
std::vector<int> hard_labels(const MatXd& proba);

MatXd confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                       int n_classes);

// Mean per-class recall over classes present in y_true.
double balanced_accuracy(const MatXd& confusion);

// Unweighted mean per-class F1 over all classes, 0/0 -> 0.
double macro_f1(const MatXd& confusion);

struct EvaluationReport {
    std::string task;
    std::string scenario;
    std::string model_kind;
    std::string test_protocols;  // comma-joined test protocol set
    double auc = 0.0;
    double balanced_accuracy = 0.0;
    double macro_f1 = 0.0;
    MatXd confusion;  // n_classes x n_classes counts

    void validate() const;
};

EvaluationReport evaluate_predictions(const MatXd& proba, const std::vector<int>& y,
                                      int n_classes);

}  // namespace pssf
