#include "pssf/ml/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pssf {

const TreeNode& Tree::descend(const VecXd& x) const {
    int idx = 0;
    while (true) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        if (node.feature < 0) return node;
        idx = x[node.feature] <= node.threshold ? node.left : node.right;
    }
}

namespace {

MatXd softmax_rows(MatXd z) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double m = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - m).exp();
        z.row(r) /= z.row(r).sum();
    }
    return z;
}

}  // namespace

MatXd TrainedModel::predict_proba(const MatXd& X) const {
    if (X.cols() != static_cast<Eigen::Index>(features.size()))
        throw Error::runtime("predict: feature column mismatch");

    if (kind == "logreg_l2") {
        MatXd z = MatXd::Zero(X.rows(), n_classes);
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            VecXd xs = (X.row(r).transpose() - mean).cwiseQuotient(sd);
            z.row(r) = (coef.transpose() * xs + intercept).transpose();
        }
        return softmax_rows(std::move(z));
    }
    if (kind == "random_forest") {
        if (trees.empty()) throw Error::runtime("predict: forest has no trees");
        MatXd proba = MatXd::Zero(X.rows(), n_classes);
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            VecXd x = X.row(r).transpose();
            VecXd acc = VecXd::Zero(n_classes);
            for (const Tree& tree : trees) acc += tree.descend(x).leaf;
            proba.row(r) = (acc / static_cast<double>(trees.size())).transpose();
        }
        return proba;
    }
    if (kind == "gradient_boosting") {
        const int k = n_classes == 2 ? 1 : n_classes;
        MatXd score = MatXd::Zero(X.rows(), k);
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            VecXd x = X.row(r).transpose();
            for (int c = 0; c < k; ++c) {
                double s = f0[c];
                for (const std::vector<Tree>& round : rounds)
                    s += learning_rate * round[static_cast<std::size_t>(c)].descend(x).leaf[0];
                score(r, c) = s;
            }
        }
        if (n_classes == 2) {
            MatXd proba(X.rows(), 2);
            for (Eigen::Index r = 0; r < X.rows(); ++r) {
                const double p1 = 1.0 / (1.0 + std::exp(-score(r, 0)));
                proba(r, 0) = 1.0 - p1;
                proba(r, 1) = p1;
            }
            return proba;
        }
        return softmax_rows(std::move(score));
    }
    throw Error::runtime("predict: unknown model kind " + kind);
}

VecXd TrainedModel::importance() const {
    const Eigen::Index p = static_cast<Eigen::Index>(features.size());
    if (kind == "logreg_l2") {
        VecXd score = VecXd::Zero(p);
        for (Eigen::Index j = 0; j < p; ++j) score[j] = coef.row(j).cwiseAbs().sum();
        return score;
    }
    VecXd score = split_gain;
    if (score.size() != p) score = VecXd::Zero(p);
    const double total = score.sum();
    if (total > 0.0) score /= total;
    return score;
}

void TrainedModel::validate() const {
    if (kind != "logreg_l2" && kind != "random_forest" && kind != "gradient_boosting")
        throw Error::runtime("model: unknown kind " + kind);
    if (task != "binary_0v2" && task != "three_class")
        throw Error::runtime("model: unknown task " + task);
    if (features.empty()) throw Error::runtime("model: no selected features");
    if (n_classes < 2) throw Error::runtime("model: needs at least two classes");
}

std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model) {
    VecXd score = model.importance();
    std::vector<std::size_t> order(model.features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return score[static_cast<Eigen::Index>(a)] > score[static_cast<Eigen::Index>(b)];
    });
    std::vector<std::pair<std::string, double>> ranked;
    for (std::size_t i : order)
        ranked.emplace_back(model.features[i], score[static_cast<Eigen::Index>(i)]);
    return ranked;
}

namespace {

Json vec_to_json(const VecXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

VecXd vec_from_json(const Json& a) {
    VecXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

Json mat_to_json(const MatXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r).transpose()));
    return rows;
}

MatXd mat_from_json(const Json& rows) {
    if (rows.empty()) return MatXd();
    MatXd m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        VecXd v = vec_from_json(rows[r]);
        m.row(static_cast<Eigen::Index>(r)) = v.transpose();
    }
    return m;
}

Json tree_to_json(const Tree& tree) {
    Json nodes = Json::array();
    for (const TreeNode& n : tree.nodes) {
        Json node;
        node["feature"] = n.feature;
        node["threshold"] = n.threshold;
        node["left"] = n.left;
        node["right"] = n.right;
        node["leaf"] = vec_to_json(n.leaf);
        nodes.push_back(std::move(node));
    }
    return nodes;
}

Tree tree_from_json(const Json& nodes) {
    Tree tree;
    for (const Json& node : nodes) {
        TreeNode n;
        n.feature = node.at("feature").get<int>();
        n.threshold = node.at("threshold").get<double>();
        n.left = node.at("left").get<int>();
        n.right = node.at("right").get<int>();
        n.leaf = vec_from_json(node.at("leaf"));
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    model.validate();
    Json doc;
    doc["format_version"] = 1;
    doc["kind"] = model.kind;
    doc["task"] = model.task;
    doc["n_classes"] = model.n_classes;
    doc["seed"] = model.seed;
    doc["features"] = model.features;
    doc["config"] = model.config_echo;
    if (model.kind == "logreg_l2") {
        doc["mean"] = vec_to_json(model.mean);
        doc["sd"] = vec_to_json(model.sd);
        doc["coef"] = mat_to_json(model.coef);
        doc["intercept"] = vec_to_json(model.intercept);
    } else if (model.kind == "random_forest") {
        Json trees = Json::array();
        for (const Tree& t : model.trees) trees.push_back(tree_to_json(t));
        doc["trees"] = std::move(trees);
        doc["split_gain"] = vec_to_json(model.split_gain);
    } else {
        Json rounds = Json::array();
        for (const std::vector<Tree>& round : model.rounds) {
            Json per_class = Json::array();
            for (const Tree& t : round) per_class.push_back(tree_to_json(t));
            rounds.push_back(std::move(per_class));
        }
        doc["rounds"] = std::move(rounds);
        doc["f0"] = vec_to_json(model.f0);
        doc["learning_rate"] = model.learning_rate;
        doc["split_gain"] = vec_to_json(model.split_gain);
    }
    write_json_file(path, doc);
}

TrainedModel load_model(const std::filesystem::path& path) {
    Json doc = read_json_file(path);
    if (doc.at("format_version").get<int>() != 1)
        throw Error::runtime("model file: unsupported format version in " + path.string());
    TrainedModel model;
    model.kind = doc.at("kind").get<std::string>();
    model.task = doc.at("task").get<std::string>();
    model.n_classes = doc.at("n_classes").get<int>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.features = doc.at("features").get<std::vector<std::string>>();
    model.config_echo = doc.at("config");
    if (model.kind == "logreg_l2") {
        model.mean = vec_from_json(doc.at("mean"));
        model.sd = vec_from_json(doc.at("sd"));
        model.coef = mat_from_json(doc.at("coef"));
        model.intercept = vec_from_json(doc.at("intercept"));
    } else if (model.kind == "random_forest") {
        for (const Json& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
        model.split_gain = vec_from_json(doc.at("split_gain"));
    } else {
        for (const Json& round : doc.at("rounds")) {
            std::vector<Tree> per_class;
            for (const Json& t : round) per_class.push_back(tree_from_json(t));
            model.rounds.push_back(std::move(per_class));
        }
        model.f0 = vec_from_json(doc.at("f0"));
        model.learning_rate = doc.at("learning_rate").get<double>();
        model.split_gain = vec_from_json(doc.at("split_gain"));
    }
    model.validate();
    return model;
}

}  // namespace pssf
