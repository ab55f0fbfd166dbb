#include "pssf/ml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pssf {

double auc_binary(const VecXd& scores, const std::vector<int>& y) {
    const std::size_t n = y.size();
    if (static_cast<std::size_t>(scores.size()) != n)
        throw Error::runtime("auc: score/label length mismatch");
    std::size_t pos = 0;
    for (int label : y) {
        if (label != 0 && label != 1) throw Error::runtime("auc: labels must be 0/1");
        pos += static_cast<std::size_t>(label);
    }
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0)
        throw Error::runtime("auc: undefined for single-class labels");

    // rank-sum form; tied scores receive their average rank, which realizes
    // half-credit for tied positive/negative pairs
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[static_cast<Eigen::Index>(order[j])] == scores[static_cast<Eigen::Index>(order[i])]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (y[order[t]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double auc_macro_ovr(const MatXd& proba, const std::vector<int>& y) {
    const int k = static_cast<int>(proba.cols());
    double sum = 0.0;
    int contributing = 0;
    for (int c = 0; c < k; ++c) {
        std::vector<int> yc(y.size());
        std::size_t pos = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            yc[i] = y[i] == c ? 1 : 0;
            pos += static_cast<std::size_t>(yc[i]);
        }
        if (pos == 0 || pos == y.size()) continue;
        sum += auc_binary(proba.col(c), yc);
        ++contributing;
    }
    if (contributing == 0)
        throw Error::runtime("auc: no class with both positives and negatives");
    return sum / contributing;
}

std::vector<int> hard_labels(const MatXd& proba) {
    std::vector<int> labels(static_cast<std::size_t>(proba.rows()));
    for (Eigen::Index r = 0; r < proba.rows(); ++r) {
        int best = 0;
        for (Eigen::Index c = 1; c < proba.cols(); ++c)
            if (proba(r, c) > proba(r, best)) best = static_cast<int>(c);
        labels[static_cast<std::size_t>(r)] = best;
    }
    return labels;
}

MatXd confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                       int n_classes) {
    if (y_true.size() != y_pred.size())
        throw Error::runtime("confusion: length mismatch");
    MatXd m = MatXd::Zero(n_classes, n_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes)
            throw Error::runtime("confusion: label out of range");
        m(y_true[i], y_pred[i]) += 1.0;
    }
    return m;
}

double balanced_accuracy(const MatXd& confusion) {
    double sum = 0.0;
    int present = 0;
    for (Eigen::Index c = 0; c < confusion.rows(); ++c) {
        const double support = confusion.row(c).sum();
        if (support <= 0.0) continue;
        sum += confusion(c, c) / support;
        ++present;
    }
    return present > 0 ? sum / present : 0.0;
}

double macro_f1(const MatXd& confusion) {
    const Eigen::Index k = confusion.rows();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        const double tp = confusion(c, c);
        const double fn = confusion.row(c).sum() - tp;
        const double fp = confusion.col(c).sum() - tp;
        const double denom = 2.0 * tp + fp + fn;
        sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
    }
    return sum / static_cast<double>(k);
}

void EvaluationReport::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(auc) || !in_unit(balanced_accuracy) || !in_unit(macro_f1))
        throw Error::runtime("evaluation report: metric outside [0, 1]");
    if (confusion.rows() != confusion.cols())
        throw Error::runtime("evaluation report: confusion matrix not square");
}

EvaluationReport evaluate_predictions(const MatXd& proba, const std::vector<int>& y,
                                      int n_classes) {
    EvaluationReport report;
    if (n_classes == 2)
        report.auc = auc_binary(proba.col(1), y);
    else
        report.auc = auc_macro_ovr(proba, y);
    report.confusion = confusion_matrix(y, hard_labels(proba), n_classes);
    report.balanced_accuracy = balanced_accuracy(report.confusion);
    report.macro_f1 = macro_f1(report.confusion);
    report.validate();
    return report;
}

}  // namespace pssf
