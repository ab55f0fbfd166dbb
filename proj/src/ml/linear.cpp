#include "pssf/ml/linear.hpp"

#include "pssf/ml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pssf {

double softmax_loss(const MatXd& X, const std::vector<int>& y, const VecXd& sample_weight,
                    const MatXd& W, const VecXd& b, double lambda2, MatXd* grad_W,
                    VecXd* grad_b) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = W.cols();
    if (static_cast<Eigen::Index>(y.size()) != n || sample_weight.size() != n)
        throw Error::runtime("softmax_loss: shape mismatch");

    const double weight_total = sample_weight.sum();
    double loss = 0.0;
    if (grad_W) grad_W->setZero(W.rows(), k);
    if (grad_b) grad_b->setZero(k);

    for (Eigen::Index i = 0; i < n; ++i) {
        VecXd z = W.transpose() * X.row(i).transpose() + b;
        const double m = z.maxCoeff();
        VecXd e = (z.array() - m).exp();
        const double denom = e.sum();
        const double w = sample_weight[i];
        loss -= w * (z[y[static_cast<std::size_t>(i)]] - m - std::log(denom));
        if (grad_W || grad_b) {
            VecXd p = e / denom;
            p[y[static_cast<std::size_t>(i)]] -= 1.0;
            p *= w / weight_total;
            if (grad_W) *grad_W += X.row(i).transpose() * p.transpose();
            if (grad_b) *grad_b += p;
        }
    }
    loss /= weight_total;
    loss += 0.5 * lambda2 * W.squaredNorm();
    if (grad_W) *grad_W += lambda2 * W;
    return loss;
}

namespace {

void check_finite(const MatXd& X) {
    if (!X.allFinite()) throw Error::runtime("training matrix contains non-finite values");
}

void check_labels(const std::vector<int>& y, int n_classes) {
    std::set<int> seen(y.begin(), y.end());
    if (seen.size() < 2) throw Error::runtime("training labels contain a single class");
    for (int label : y)
        if (label < 0 || label >= n_classes) throw Error::runtime("label out of range");
}

VecXd per_sample_weights(const std::vector<int>& y, const VecXd& class_weight) {
    VecXd w(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) w[static_cast<Eigen::Index>(i)] = class_weight[y[i]];
    return w;
}

}  // namespace

TrainedModel train_logreg_l2(const MatXd& X, const std::vector<int>& y,
                             const std::vector<std::string>& feature_names, int n_classes,
                             const LogregConfig& cfg, const VecXd& class_weight) {
    check_finite(X);
    check_labels(y, n_classes);
    const Standardizer standardizer = Standardizer::fit(X);
    const MatXd Xs = standardizer.apply(X);
    const VecXd w = per_sample_weights(y, class_weight);

    MatXd W = MatXd::Zero(X.cols(), n_classes);
    VecXd b = VecXd::Zero(n_classes);
    MatXd gW;
    VecXd gb;
    double loss = softmax_loss(Xs, y, w, W, b, cfg.lambda2, &gW, &gb);
    double step = 1.0;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const double grad_sq = gW.squaredNorm() + gb.squaredNorm();
        if (grad_sq < 1e-24) break;
        // Armijo backtracking on the full objective
        double next_loss = 0.0;
        MatXd Wn;
        VecXd bn;
        while (true) {
            Wn = W - step * gW;
            bn = b - step * gb;
            next_loss = softmax_loss(Xs, y, w, Wn, bn, cfg.lambda2, nullptr, nullptr);
            if (next_loss <= loss - 1e-4 * step * grad_sq || step < 1e-16) break;
            step *= 0.5;
        }
        W = std::move(Wn);
        b = std::move(bn);
        const double change = (loss - next_loss) / std::max(1.0, std::abs(loss));
        loss = next_loss;
        softmax_loss(Xs, y, w, W, b, cfg.lambda2, &gW, &gb);
        if (change >= 0.0 && change < cfg.tolerance) break;
        step = std::min(step * 2.0, 1e6);
    }

    TrainedModel model;
    model.kind = "logreg_l2";
    model.task = n_classes == 2 ? "binary_0v2" : "three_class";
    model.features = feature_names;
    model.n_classes = n_classes;
    model.mean = standardizer.mean;
    model.sd = standardizer.sd;
    model.coef = W;
    model.intercept = b;
    model.config_echo["lambda2"] = cfg.lambda2;
    model.config_echo["tolerance"] = cfg.tolerance;
    return model;
}

std::vector<std::string> l1_select(const MatXd& X, const std::vector<int>& y,
                                   const std::vector<std::string>& feature_names, int n_classes,
                                   const L1Config& cfg, const VecXd& class_weight) {
    check_finite(X);
    check_labels(y, n_classes);
    if (static_cast<Eigen::Index>(feature_names.size()) != X.cols())
        throw Error::runtime("l1_select: feature name count mismatch");
    const VecXd w = per_sample_weights(y, class_weight);

    MatXd W = MatXd::Zero(X.cols(), n_classes);
    VecXd b = VecXd::Zero(n_classes);
    MatXd gW;
    VecXd gb;
    double smooth = softmax_loss(X, y, w, W, b, 0.0, &gW, &gb);
    double objective = smooth;  // W = 0 has no penalty
    double step = 1.0;

    auto l1_norm = [](const MatXd& m) { return m.cwiseAbs().sum(); };
    auto soft = [](double v, double t) {
        if (v > t) return v - t;
        if (v < -t) return v + t;
        return 0.0;
    };

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        MatXd Wn;
        VecXd bn;
        double smooth_next = 0.0;
        while (true) {
            Wn = W - step * gW;
            for (Eigen::Index i = 0; i < Wn.size(); ++i)
                Wn.data()[i] = soft(Wn.data()[i], step * cfg.lambda1);
            bn = b - step * gb;  // bias unpenalized
            smooth_next = softmax_loss(X, y, w, Wn, bn, 0.0, nullptr, nullptr);
            // standard ISTA sufficient-decrease test against the quadratic model
            const double dq = (Wn - W).squaredNorm() + (bn - b).squaredNorm();
            const double linear = (gW.array() * (Wn - W).array()).sum() + gb.dot(bn - b);
            if (smooth_next <= smooth + linear + dq / (2.0 * step) || step < 1e-16) break;
            step *= 0.5;
        }
        W = std::move(Wn);
        b = std::move(bn);
        const double next_objective = smooth_next + cfg.lambda1 * l1_norm(W);
        const double change = std::abs(objective - next_objective) / std::max(1.0, std::abs(objective));
        objective = next_objective;
        smooth = softmax_loss(X, y, w, W, b, 0.0, &gW, &gb);
        if (change < cfg.tolerance) break;
        step = std::min(step * 2.0, 1e6);
    }

    std::vector<std::string> selected;
    for (Eigen::Index j = 0; j < W.rows(); ++j)
        if (W.row(j).cwiseAbs().maxCoeff() > 0.0) selected.push_back(feature_names[static_cast<std::size_t>(j)]);
    return selected;
}

}  // namespace pssf
